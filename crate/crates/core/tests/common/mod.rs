//! Independent oracles over explicit products, shared by the integration
//! tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use delplan::del::{iterate_levels, pointed_product, EpistemicModel, EventModel, IterateBudget};
use delplan::formula::Formula;
use delplan::gen::{random_formula, random_models, InstanceShape};
use delplan::planner::PlanningInstance;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn manifest_path(rel: &str) -> String {
    format!("{}/{rel}", env!("CARGO_MANIFEST_DIR"))
}

/// Explicit models of every level up to `depth`.
pub fn levels(m: &EpistemicModel, ev: &EventModel, depth: usize) -> Vec<EpistemicModel> {
    iterate_levels(m, ev, depth, IterateBudget::default()).unwrap()
}

/// Truth of `f` at every history of every level, by direct model checking.
pub fn truth_by_history(levels: &[EpistemicModel], f: &Formula) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    for m in levels {
        let truth = m.truth_set(f).unwrap();
        for (w, t) in truth.into_iter().enumerate() {
            out.push((m.worlds()[w].clone(), t));
        }
    }
    out
}

/// Replays `plan` from the designated world through pointed products.
pub fn replay(
    m: &EpistemicModel,
    world: &str,
    ev: &EventModel,
    plan: &[String],
) -> Option<EpistemicModel> {
    let mut cur = m.clone();
    cur.set_point(world).unwrap();
    let mut name = world.to_string();
    for e in plan {
        cur = pointed_product(&cur, &name, ev, e).unwrap()?;
        name = format!("{name}.{e}");
    }
    Some(cur)
}

/// Every plan of length at most `max_len` over `allowed` after which the
/// goal holds, found by breadth-first search over explicit pointed products.
pub fn bfs_plans(inst: &PlanningInstance, max_len: usize) -> BTreeSet<Vec<String>> {
    let ev = &inst.events;
    let allowed: Vec<String> = inst
        .allowed
        .iter()
        .map(|&e| ev.events()[e].clone())
        .collect();
    let root = inst.model.worlds()[inst.initial_world].clone();
    let mut found = BTreeSet::new();
    let mut frontier = vec![(Vec::<String>::new(), inst.model.clone(), root)];
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (plan, m, point) in frontier {
            if m.check(&point, &inst.goal).unwrap() {
                found.insert(plan.clone());
            }
            if len == max_len {
                continue;
            }
            for e in &allowed {
                if let Some(m2) = pointed_product(&m, &point, ev, e).unwrap() {
                    let mut p2 = plan.clone();
                    p2.push(e.clone());
                    next.push((p2, m2, format!("{point}.{e}")));
                }
            }
        }
        frontier = next;
    }
    found
}

/// A random planning instance: random models, designated world, nonempty
/// allowed subset and a goal of knowledge depth at most `depth`.
pub fn random_instance<R: Rng>(rng: &mut R, depth: usize, all_events: bool) -> PlanningInstance {
    let (m, ev) = random_models(rng, InstanceShape::default());
    let world = m.worlds().choose(rng).unwrap().clone();
    let mut allowed: Vec<&str> = ev.events().iter().map(String::as_str).collect();
    if !all_events {
        allowed.retain(|_| rng.gen_bool(0.7));
        if allowed.is_empty() {
            allowed.push(ev.events()[0].as_str());
        }
    }
    let allowed: Vec<String> = allowed.into_iter().map(String::from).collect();
    let refs: Vec<&str> = allowed.iter().map(String::as_str).collect();
    let size = rng.gen_range(1..=4);
    let goal = random_formula(rng, m.signature(), depth, size);
    PlanningInstance::new(m, &world, ev, &refs, goal).unwrap()
}
