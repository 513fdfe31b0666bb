//! Protocol synthesis for temporal epistemic goals, with the independent
//! depth-bounded check.

use delplan::protocol::{check_protocol, synthesize_protocol, SynthesisOptions};
use delplan::regular::RegularRepresentation;
use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let sc = Scenario::load(concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/m0_e0.json"))?;
    let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
    for goal in [
        "NOW p",
        "EF K[a] p",
        "AF K[a] p",
        "AG p",
        "EG p",
        "AG false",
    ] {
        let goal = sc.parse_goal(goal)?;
        match synthesize_protocol(&rep, "w1", &goal, SynthesisOptions::default())? {
            None => println!("{goal}: no protocol"),
            Some(pa) => {
                let ok = check_protocol(&pa, &goal, &rep, 5)?;
                println!(
                    "{goal}: {} (check to depth 5: {ok})",
                    pa.words(2).join(", ")
                );
            }
        }
    }
    Ok(())
}
