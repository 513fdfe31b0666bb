//! Loading, validating and saving scenario files.

use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/m0_e0.json"))?;
    println!(
        "{} worlds, {} events, point {}, goal {:?}",
        sc.model.num_worlds(),
        sc.events.num_events(),
        sc.point_name()?,
        sc.file.goal
    );
    let text = sc.to_json();
    assert_eq!(Scenario::from_json(&text)?.to_json(), text);
    print!("{text}");

    let bad = r#"{"agents": ["a"], "ap": ["p"], "model": {"worlds": [{"id": "w"}]},
        "events": {"events": [{"id": "e", "pre": "K[a] p"}]}}"#;
    if let Err(e) = Scenario::from_json(bad) {
        println!("rejected: {e}");
    }
    Ok(())
}
