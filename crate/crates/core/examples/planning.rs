//! Epistemic planning: the regular set of all plans, the shortest one and a
//! bounded enumeration.

use delplan::planner::{render_plan, synthesize_plans};
use delplan::scenario::Scenario;

fn main() -> delplan::Result<()> {
    let sc = Scenario::load(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/scenarios/private_tell.json"
    ))?;
    for goal in ["K[a] p & ~K[b] K[a] p", "K[b] K[a] p", "K[a] ~p"] {
        let goal = sc.parse_formula(goal)?;
        let pa = synthesize_plans(&sc.planning_instance(&goal)?, 100_000)?;
        let (empty, stats) = pa.dfa.emptiness_with_stats();
        println!(
            "{goal}: {} states, solvable {}, {} states visited",
            pa.dfa.num_states(),
            !empty,
            stats.states_visited
        );
        if let Some(p) = pa.shortest_plan() {
            println!("  shortest: {}", render_plan(&p));
            let list = pa.enumerate(3, 5);
            let plans: Vec<String> = list.plans.iter().map(|p| render_plan(p)).collect();
            println!(
                "  first plans: {}{}",
                plans.join(", "),
                if list.truncated { ", ..." } else { "" }
            );
        }
    }
    Ok(())
}
