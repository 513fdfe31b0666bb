//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! fails. `DELPLAN_SEED` changes the random instances.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{bfs_plans, levels, manifest_path, random_instance, replay, truth_by_history};
use delplan::automata::{Alphabet, Dfa, Letter};
use delplan::del::{EpistemicModel, EventModel, History, IterateBudget};
use delplan::formula::{Formula, GoalFormula, GoalHead};
use delplan::gen::{random_formula, random_models, seed_from_env, InstanceShape};
use delplan::planner::{decide, synthesize_plans};
use delplan::protocol::{check_protocol, synthesize_protocol, SynthesisOptions};
use delplan::regular::{verify_against_oracle, RegularRepresentation};
use delplan::sat::{blowup_report, SatCompiler};
use delplan::scenario::Scenario;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn(u64) -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !($cond) {
            return Err(format!($($msg)*));
        }
    };
}

fn rng(base: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base.wrapping_mul(1_000_003).wrapping_add(criterion))
}

fn suite(base: u64, n: usize) -> Vec<(EpistemicModel, EventModel)> {
    let mut r = rng(base, 0);
    (0..n)
        .map(|_| random_models(&mut r, InstanceShape::default()))
        .collect()
}

fn regular_structure(base: u64) -> Outcome {
    let mut histories = 0;
    for (k, (m, ev)) in suite(base, 200).iter().enumerate() {
        let rep = RegularRepresentation::build(m, ev).map_err(|e| e.to_string())?;
        match verify_against_oracle(&rep, m, ev, 4, IterateBudget::default())
            .map_err(|e| e.to_string())?
        {
            delplan::regular::OracleReport::Ok { histories: h, .. } => histories += h,
            bad => return Err(format!("instance {k}: {bad}")),
        }
    }
    Ok(format!(
        "200 instances, depth 4, {histories} histories compared"
    ))
}

/// `|W|` plus relation edges.
fn model_size(m: &EpistemicModel) -> usize {
    m.num_worlds() + m.size()
}

/// `|E|` plus relation edges plus pre- and postcondition sizes.
fn event_size(ev: &EventModel) -> usize {
    ev.num_events() + ev.size()
}

const SIZE_CONSTANT: f64 = 1.0;

fn size_bound(base: u64) -> Outcome {
    let mut worst: f64 = 0.0;
    for (k, (m, ev)) in suite(base, 200).iter().enumerate() {
        let rep = RegularRepresentation::build(m, ev).map_err(|e| e.to_string())?;
        let ap = m.signature().props().len() as u32;
        let states = rep.domain().num_states();
        ensure!(
            states <= 2usize.pow(ap) + 1,
            "instance {k}: domain has {states} states, |AP| = {ap}"
        );
        let r = rep.size_report();
        let total = r.domain.0
            + r.domain.1
            + r.valuations.iter().map(|v| v.1 + v.2).sum::<usize>()
            + r.relations
                .iter()
                .map(|t| t.states + t.transitions)
                .sum::<usize>();
        let n = (model_size(m) + event_size(ev)) as f64;
        let ratio = total as f64 / (2f64.powi(ap as i32) * n.powi(3));
        worst = worst.max(ratio);
        let within = ratio <= SIZE_CONSTANT;
        ensure!(
            within,
            "instance {k}: size {total} exceeds the bound (ratio {ratio:.4})"
        );
    }
    Ok(format!(
        "domain <= 2^|AP|+1 everywhere, max size ratio {worst:.5} <= c = {SIZE_CONSTANT}"
    ))
}

fn sat_equivalence(base: u64) -> Outcome {
    let mut r = rng(base, 3);
    let mut checked = 0usize;
    for (k, (m, ev)) in suite(base, 60).iter().enumerate() {
        let rep = RegularRepresentation::build(m, ev).map_err(|e| e.to_string())?;
        let lv = levels(m, ev, 4);
        let mut c = SatCompiler::new(&rep);
        for _ in 0..5 {
            let size = rand::Rng::gen_range(&mut r, 1..=6);
            let f = random_formula(&mut r, m.signature(), 2, size);
            for (name, truth) in truth_by_history(&lv, &f) {
                let h = History::parse_dotted(&name).expect("product names parse");
                let got = c.holds_at(&f, &h).map_err(|e| e.to_string())?;
                ensure!(
                    got == truth,
                    "instance {k}: {f} at {name}: automaton {got}, model {truth}"
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "60 instances x 5 formulas, {checked} (history, formula) pairs, 0 mismatches"
    ))
}

fn chain(n: usize) -> Dfa {
    let al = Alphabet::new(["x", "y"]).unwrap();
    let mut d = Dfa::new(al);
    let mut q = 0;
    for _ in 0..n {
        let t = d.add_state(false);
        d.set_transition(q, Letter(1), q);
        d.set_transition(q, Letter(0), t);
        q = t;
    }
    d.set_accepting(q, true);
    d
}

fn median_time(d: &Dfa) -> Duration {
    let mut times: Vec<Duration> = (0..7)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(d.emptiness_with_stats());
            t.elapsed()
        })
        .collect();
    times.sort();
    times[3]
}

fn planner_check(base: u64) -> Outcome {
    let mut r = rng(base, 4);
    let mut plans = 0usize;
    for k in 0..120 {
        let inst = random_instance(&mut r, 2, false);
        let pa = synthesize_plans(&inst, 100_000).map_err(|e| e.to_string())?;
        let (empty, stats) = pa.dfa.emptiness_with_stats();
        ensure!(empty == pa.is_empty(), "instance {k}: emptiness disagrees");
        ensure!(
            stats.transitions_inspected <= pa.dfa.num_transitions()
                && stats.states_visited <= pa.dfa.num_states(),
            "instance {k}: emptiness inspected more than the automaton"
        );
        let list = pa.enumerate(4, usize::MAX);
        let root = inst.model.worlds()[inst.initial_world].clone();
        for plan in &list.plans {
            let m = replay(&inst.model, &root, &inst.events, plan)
                .ok_or_else(|| format!("instance {k}: plan {plan:?} is not executable"))?;
            let point = m.worlds()[m.point().expect("pointed")].clone();
            ensure!(
                m.check(&point, &inst.goal).unwrap(),
                "instance {k}: plan {plan:?} misses {}",
                inst.goal
            );
        }
        let enumerated: BTreeSet<Vec<String>> = list.plans.into_iter().collect();
        for plan in bfs_plans(&inst, 4) {
            let refs: Vec<&str> = plan.iter().map(String::as_str).collect();
            ensure!(
                pa.accepts(&refs),
                "instance {k}: search plan {plan:?} rejected"
            );
            ensure!(
                enumerated.contains(&plan),
                "instance {k}: search plan {plan:?} not enumerated"
            );
        }
        plans += enumerated.len();
    }

    // emptiness work is exactly linear on a worst-case family
    let mut per_transition = Vec::new();
    for n in [2_000usize, 16_000, 128_000] {
        let d = chain(n);
        let (empty, stats) = d.emptiness_with_stats();
        ensure!(!empty, "chain {n} should be nonempty");
        ensure!(
            stats.transitions_inspected <= d.num_transitions() && stats.states_visited == n + 1,
            "chain {n}: {stats:?} for {} transitions",
            d.num_transitions()
        );
        per_transition.push(median_time(&d).as_secs_f64() / d.num_transitions() as f64);
    }
    let growth = per_transition[2] / per_transition[0].max(1e-10);
    let linear = growth < 16.0;
    ensure!(
        linear,
        "time per transition grew {growth:.1}x over a 64x size increase"
    );
    Ok(format!(
        "120 instances, {plans} plans of length <= 4 replayed, all search plans accepted; emptiness per-transition time ratio {growth:.2} over 64x"
    ))
}

fn goldens(_base: u64) -> Outcome {
    let cases = [
        (
            vec!["plan", "scenarios/m0_e0.json"],
            "plan_know.txt",
            0,
            "shortest plan: e1\n",
        ),
        (
            vec!["plan", "scenarios/m0_e0.json", "--goal", "p"],
            "plan_already_true.txt",
            0,
            "shortest plan: ε\n",
        ),
        (
            vec!["plan", "scenarios/m0_e0.json", "--goal", "false"],
            "plan_false.txt",
            1,
            "no plan\n",
        ),
    ];
    for (args, file, code, line) in cases {
        let o = Command::new(env!("CARGO_BIN_EXE_delplan"))
            .args(&args)
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .output()
            .map_err(|e| e.to_string())?;
        let want = std::fs::read(manifest_path(&format!("tests/golden/{file}")))
            .map_err(|e| e.to_string())?;
        ensure!(
            o.status.code() == Some(code),
            "{args:?}: exit {:?}",
            o.status.code()
        );
        ensure!(o.stdout == want, "{args:?}: output differs from {file}");
        ensure!(
            String::from_utf8_lossy(&o.stdout).ends_with(line),
            "{args:?}: expected `{}`",
            line.trim()
        );
    }
    let sc = Scenario::load(manifest_path("scenarios/m0_e0.json")).map_err(|e| e.to_string())?;
    let inst = sc
        .planning_instance(&Formula::False)
        .map_err(|e| e.to_string())?;
    ensure!(
        synthesize_plans(&inst, 1000).unwrap().dfa.num_states() == 1,
        "false is not the empty automaton"
    );
    Ok("K[a] p -> e1, p -> ε, false -> empty; byte-identical".into())
}

fn protocols(base: u64) -> Outcome {
    let mut r = rng(base, 6);
    let (mut agreed, mut checked, mut mutated) = (0, 0, 0);
    for k in 0..100 {
        let inst = random_instance(&mut r, 2, true);
        let rep =
            RegularRepresentation::build(&inst.model, &inst.events).map_err(|e| e.to_string())?;
        let root = inst.model.worlds()[inst.initial_world].clone();
        let synth = |head: GoalHead, body: &Formula| {
            let g = GoalFormula::new(head, body.clone());
            synthesize_protocol(&rep, &root, &g, SynthesisOptions::default()).map(|p| (g, p))
        };

        let (ef, pa) = synth(GoalHead::ExistsFinally, &inst.goal).map_err(|e| e.to_string())?;
        ensure!(
            pa.is_some() == decide(&inst).unwrap(),
            "instance {k}: EF and planner disagree on {}",
            inst.goal
        );
        agreed += 1;

        for head in [
            GoalHead::Now,
            GoalHead::AlwaysGlobally,
            GoalHead::AlwaysFinally,
            GoalHead::ExistsFinally,
            GoalHead::ExistsGlobally,
        ] {
            if let (g, Some(p)) = synth(head, &inst.goal).map_err(|e| e.to_string())? {
                ensure!(
                    check_protocol(&p, &g, &rep, 5).unwrap(),
                    "instance {k}: protocol for {g} fails the check"
                );
                checked += 1;
            }
        }

        let (_, none) =
            synth(GoalHead::AlwaysGlobally, &Formula::False).map_err(|e| e.to_string())?;
        ensure!(none.is_none(), "instance {k}: AG false has a protocol");

        // cutting the only witness branch of an EF protocol breaks it
        if let Some(p) = pa {
            let words = p.words(5);
            if words.len() > 1 {
                let cut = p.without_branch(&words[1]).unwrap();
                ensure!(
                    !check_protocol(&cut, &ef, &rep, 5).unwrap(),
                    "instance {k}: mutant of {ef} still passes"
                );
                mutated += 1;
            }
        }
        // a serial protocol left with a dead end fails
        let (eg, pa) = synth(GoalHead::ExistsGlobally, &inst.goal).map_err(|e| e.to_string())?;
        if let Some(p) = pa {
            let cut = p.without_branch(&p.words(1)[1]).unwrap();
            ensure!(
                !check_protocol(&cut, &eg, &rep, 5).unwrap(),
                "instance {k}: mutant of {eg} still passes"
            );
            mutated += 1;
        }
    }
    Ok(format!(
        "{agreed} EF/planner agreements, {checked} protocols checked to depth 5, AG false empty, {mutated} mutants rejected"
    ))
}

fn blowup(_base: u64) -> Outcome {
    let sc =
        Scenario::load(manifest_path("scenarios/two_agents.json")).map_err(|e| e.to_string())?;
    ensure!(
        sc.signature.agents().len() == 2 && sc.signature.props().len() == 2,
        "scenario shape"
    );
    let f = sc
        .parse_formula("K[b] ~K[a] q")
        .map_err(|e| e.to_string())?;
    ensure!(f.nesting_depth() == 2, "formula depth");
    let rep = RegularRepresentation::build(&sc.model, &sc.events).map_err(|e| e.to_string())?;
    let report = blowup_report(&f, &rep).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = report
        .levels
        .iter()
        .map(|l| l.before_minimization)
        .collect();
    ensure!(counts.len() == 3, "expected 3 levels, got {counts:?}");
    ensure!(
        counts.windows(2).all(|w| w[0] <= w[1]),
        "pre-minimization counts decrease: {counts:?}"
    );
    Ok(format!("pre-minimization states per level {counts:?}"))
}

fn main() {
    let base = seed_from_env(20240);
    println!("acceptance (seed {base})");
    let criteria: [Criterion; 7] = [
        (
            "regular structure matches iterated products",
            regular_structure,
        ),
        ("representation size bounds", size_bound),
        ("sat compiler agrees with model checking", sat_equivalence),
        ("planner soundness and bounded completeness", planner_check),
        ("plan automaton goldens", goldens),
        ("protocol synthesis", protocols),
        ("blowup observability", blowup),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome =
            std::panic::catch_unwind(|| run(base)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
