//! Random instances checked against the explicit products. Set
//! `DELPLAN_SEED` to reproduce a run.

use delplan::del::IterateBudget;
use delplan::gen::{random_formula, random_models, rng_from_env, seed_from_env, InstanceShape};
use delplan::regular::{verify_against_oracle, RegularRepresentation};
use delplan::sat::SatCompiler;

fn main() -> delplan::Result<()> {
    println!("seed {}", seed_from_env(1));
    let mut rng = rng_from_env(1);
    for k in 0..10 {
        let (m, ev) = random_models(&mut rng, InstanceShape::default());
        let rep = RegularRepresentation::build(&m, &ev)?;
        let report = verify_against_oracle(&rep, &m, &ev, 3, IterateBudget::default())?;
        let f = random_formula(&mut rng, m.signature(), 2, 4);
        let sat = SatCompiler::new(&rep).compile(&f)?;
        println!(
            "#{k}: |W|={} |E|={} domain {} states, {report}; sat({f}) {} states",
            m.num_worlds(),
            ev.num_events(),
            rep.domain().num_states(),
            sat.num_states()
        );
    }
    Ok(())
}
