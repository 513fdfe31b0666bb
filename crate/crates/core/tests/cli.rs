mod common;

use std::process::{Command, Output};

use common::manifest_path;

fn delplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delplan"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(manifest_path(&format!("tests/golden/{name}"))).unwrap()
}

const M0: &str = "scenarios/m0_e0.json";

#[test]
fn outputs_match_goldens() {
    let cases: &[(&[&str], &str, i32)] = &[
        (&["plan", M0], "plan_know.txt", 0),
        (&["plan", M0, "--goal", "p"], "plan_already_true.txt", 0),
        (&["plan", M0, "--goal", "false"], "plan_false.txt", 1),
        (
            &[
                "plan",
                M0,
                "--goal",
                "true",
                "--enumerate",
                "--max-len",
                "2",
            ],
            "plan_enumerate.txt",
            0,
        ),
        (&["explore", M0, "--depth", "2"], "explore.txt", 0),
        (&["product", M0, "-n", "1"], "product.txt", 0),
        (
            &["compile", M0, "--formula", "K[a] p", "--blowup"],
            "compile.txt",
            0,
        ),
        (&["synth", M0, "--goal", "EF K[a] p"], "synth_ef.txt", 0),
        (&["check", M0, "--formula", "K[a] p"], "check.txt", 1),
    ];
    for (args, file, code) in cases {
        let o = delplan(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}");
        assert_eq!(stdout(&o), golden(file), "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        delplan(&["synth", M0, "--goal", "AG false"]).status.code(),
        Some(1)
    );
    assert_eq!(
        delplan(&["plan", M0, "--goal", "K[z] p"]).status.code(),
        Some(2)
    );
    assert_eq!(delplan(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(delplan(&["plan", "missing.json"]).status.code(), Some(2));
    let o = delplan(&["compile", M0, "--formula", "K[a] p", "--max-states", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(
        delplan(&["explore", M0, "--depth", "3", "--verify"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(delplan(&["--help"]).status.code(), Some(0));
}

#[test]
fn explore_counts_match_iteration() {
    let sc = delplan::scenario::Scenario::load(manifest_path(M0)).unwrap();
    let lv = common::levels(&sc.model, &sc.events, 2);
    let out = stdout(&delplan(&["explore", M0, "--depth", "2"]));
    for (n, m) in lv.iter().enumerate() {
        assert!(out.contains(&format!("{n}\t{}\t{}\n", m.num_worlds(), m.size())));
    }
}

#[test]
fn schema_errors_name_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"agents": ["a"], "ap": ["p"], "model": {"worlds": [{"id": "w"}]},
            "events": {"events": [{"id": "e", "pre": "K[a] p"}]}}"#,
    )
    .unwrap();
    let o = delplan(&["plan", path.to_str().unwrap(), "--goal", "p"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("events.events[0].pre") && err.contains("non-propositional precondition"));
}

#[test]
fn artifacts_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for k in 0..2 {
        let base = dir.path().join(format!("run{k}"));
        std::fs::create_dir_all(&base).unwrap();
        let p = |name: &str| base.join(name).to_str().unwrap().to_string();
        let o = delplan(&[
            "compile",
            M0,
            "--dot",
            &p("rep"),
            "--formula",
            "K[a] ~K[a] p",
            "--emit-sat-dot",
            &p("sat"),
        ]);
        assert!(o.status.success());
        let o = delplan(&[
            "plan",
            M0,
            "--dot",
            &p("plan.dot"),
            "--json",
            &p("plan.json"),
        ]);
        assert!(o.status.success());
        let o = delplan(&[
            "synth",
            M0,
            "--goal",
            "AG p",
            "--json",
            &p("proto.json"),
            "--dot",
            &p("proto.dot"),
        ]);
        assert!(o.status.success());
        let mut files: Vec<(String, String)> = Vec::new();
        for sub in ["rep", "sat"] {
            let mut names: Vec<_> = std::fs::read_dir(base.join(sub))
                .unwrap()
                .map(|e| e.unwrap().path())
                .collect();
            names.sort();
            for n in names {
                files.push((
                    n.file_name().unwrap().to_string_lossy().into(),
                    std::fs::read_to_string(&n).unwrap(),
                ));
            }
        }
        for f in ["plan.dot", "plan.json", "proto.json", "proto.dot"] {
            files.push((f.into(), std::fs::read_to_string(base.join(f)).unwrap()));
        }
        runs.push(files);
    }
    assert_eq!(runs[0], runs[1]);
    let names: Vec<&str> = runs[0].iter().map(|(n, _)| n.as_str()).collect();
    assert!(names.contains(&"domain.dot"));
    let table: serde_json::Value =
        serde_json::from_str(&runs[0].iter().find(|(n, _)| n == "plan.json").unwrap().1).unwrap();
    assert_eq!(table["events"], serde_json::json!(["e1", "e2"]));
    assert_eq!(table["instance_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn scenarios_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["m0_e0.json", "private_tell.json", "two_agents.json"] {
        let sc =
            delplan::scenario::Scenario::load(manifest_path(&format!("scenarios/{name}"))).unwrap();
        let path = dir.path().join(name);
        sc.save(&path).unwrap();
        let again = delplan::scenario::Scenario::load(&path).unwrap();
        assert_eq!(again.file, sc.file);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), again.to_json());
    }
}
