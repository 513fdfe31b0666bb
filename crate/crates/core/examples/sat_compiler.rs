//! Compiles epistemic formulas into automata over histories and reports the
//! state counts per knowledge level.

use delplan::del::History;
use delplan::regular::RegularRepresentation;
use delplan::sat::{blowup_report, SatCompiler};
use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let sc = Scenario::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/private_tell.json"
    ))?;
    let rep = RegularRepresentation::build(&sc.model, &sc.events)?;
    let mut c = SatCompiler::new(&rep);
    let f = sc.parse_formula("K[a] p & ~K[b] K[a] p")?;
    let d = c.compile(&f)?;
    println!("sat({f}): {} states", d.num_states());
    for h in ["w1", "w1.tell", "w1.skip.tell", "w2.skip"] {
        let h = History::parse_dotted(h).unwrap();
        println!("  {:14} {}", h.to_string(), c.holds_at(&f, &h)?);
    }
    let g = sc.parse_formula("K[b] ~K[a] ~K[b] p")?;
    print!("{}", blowup_report(&g, &rep)?);
    Ok(())
}
