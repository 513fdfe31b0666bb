//! Seeded random instances and formulas for property tests and demos.
//!
//! `DELPLAN_SEED` overrides the default seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::del::{EpistemicModel, EventModel};
use crate::formula::{Formula, Signature};

pub const SEED_VAR: &str = "DELPLAN_SEED";

/// Seed from `DELPLAN_SEED`, or `default` when unset or unparsable.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var(SEED_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

pub fn rng_from_env(default: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_from_env(default))
}

#[derive(Debug, Clone, Copy)]
pub struct InstanceShape {
    pub max_worlds: usize,
    pub max_events: usize,
    pub max_props: usize,
    pub max_agents: usize,
    pub edge_probability: f64,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            max_worlds: 4,
            max_events: 3,
            max_props: 3,
            max_agents: 2,
            edge_probability: 0.5,
        }
    }
}

const PROPS: [&str; 4] = ["p", "q", "r", "s"];
const AGENTS: [&str; 3] = ["a", "b", "c"];

/// Random epistemic model and propositional event model over a shared
/// signature. Worlds are `w1..`, events `e1..`.
pub fn random_models<R: Rng>(rng: &mut R, shape: InstanceShape) -> (EpistemicModel, EventModel) {
    let nprops = rng.gen_range(1..=shape.max_props.clamp(1, PROPS.len()));
    let nagents = rng.gen_range(1..=shape.max_agents.clamp(1, AGENTS.len()));
    let sig = Signature::new(
        AGENTS[..nagents].iter().copied(),
        PROPS[..nprops].iter().copied(),
    )
    .expect("distinct names");
    let nw = rng.gen_range(1..=shape.max_worlds.max(1));
    let ne = rng.gen_range(1..=shape.max_events.max(1));
    let worlds: Vec<String> = (1..=nw).map(|k| format!("w{k}")).collect();
    let events: Vec<String> = (1..=ne).map(|k| format!("e{k}")).collect();

    let mut m = EpistemicModel::new(sig.clone(), worlds.clone()).expect("distinct worlds");
    for w in &worlds {
        for p in sig.props() {
            if rng.gen_bool(0.5) {
                m.set_true(w, p).unwrap();
            }
        }
    }
    for a in sig.agents() {
        for x in &worlds {
            for y in &worlds {
                if rng.gen_bool(shape.edge_probability) {
                    m.add_edge(a, x, y).unwrap();
                }
            }
        }
    }

    let mut ev = EventModel::new(sig.clone(), events.clone()).expect("distinct events");
    for e in &events {
        if rng.gen_bool(0.6) {
            let size = rng.gen_range(1..=3);
            ev.set_pre(e, random_formula(rng, &sig, 0, size)).unwrap();
        }
        for p in sig.props() {
            match rng.gen_range(0..6) {
                0 => ev.set_post(e, p, Formula::True).unwrap(),
                1 => ev.set_post(e, p, Formula::False).unwrap(),
                2 => {
                    let size = rng.gen_range(1..=3);
                    ev.set_post(e, p, random_formula(rng, &sig, 0, size))
                        .unwrap()
                }
                _ => {}
            }
        }
    }
    for a in sig.agents() {
        for x in &events {
            for y in &events {
                if rng.gen_bool(shape.edge_probability) {
                    ev.add_edge(a, x, y).unwrap();
                }
            }
        }
    }
    (m, ev)
}

/// Random formula with at most `max_depth` nested knowledge operators and
/// roughly `size` connectives.
pub fn random_formula<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    max_depth: usize,
    size: usize,
) -> Formula {
    if size == 0 {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(
                sig.props()
                    .choose(rng)
                    .expect("at least one proposition")
                    .clone(),
            ),
        };
    }
    let choices = if max_depth > 0 && !sig.agents().is_empty() {
        5
    } else {
        4
    };
    match rng.gen_range(0..choices) {
        0 => Formula::not(random_formula(rng, sig, max_depth, size - 1)),
        1..=3 => {
            let left = rng.gen_range(0..size);
            let a = random_formula(rng, sig, max_depth, left);
            let b = random_formula(rng, sig, max_depth, size - 1 - left);
            match rng.gen_range(0..3) {
                0 => Formula::or(a, b),
                1 => Formula::and(a, b),
                _ => Formula::implies(a, b),
            }
        }
        _ => {
            let agent = sig.agents().choose(rng).expect("nonempty").clone();
            Formula::know(agent, random_formula(rng, sig, max_depth - 1, size - 1))
        }
    }
}
