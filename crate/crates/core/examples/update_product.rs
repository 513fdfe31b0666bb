//! Product updates and their iteration, level by level.

use delplan::del::{iterate_levels, pointed_product, IterateBudget};
use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/m0_e0.json");
    let sc = Scenario::load(path)?;
    for (n, level) in iterate_levels(&sc.model, &sc.events, 3, IterateBudget::default())?
        .iter()
        .enumerate()
    {
        let names: Vec<&str> = level.worlds().iter().map(String::as_str).collect();
        println!("level {n}: {} worlds: {}", names.len(), names.join(" "));
    }
    match pointed_product(&sc.model, "w2", &sc.events, "e2")? {
        Some(m) => println!("w2.e2 exists in a model of {} worlds", m.num_worlds()),
        None => println!("e2 is not executable at w2"),
    }
    Ok(())
}
