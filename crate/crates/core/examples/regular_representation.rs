//! Builds the domain automaton, valuation automata and relation transducers
//! of a scenario, prints their sizes and cross-checks them against the
//! explicit iterated products.

use delplan::del::IterateBudget;
use delplan::regular::{verify_against_oracle, RegularRepresentation};
use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/private_tell.json").into()
    });
    let sc = Scenario::load(&path)?;
    let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
    print!("{}", rep.size_report());
    let report = verify_against_oracle(&rep, &sc.model, &sc.events, 4, IterateBudget::default())?;
    println!("oracle to depth 4: {report}");
    for (name, dot) in rep.dot_files().iter().take(1) {
        println!("--- {name}");
        print!("{dot}");
    }
    Ok(())
}
