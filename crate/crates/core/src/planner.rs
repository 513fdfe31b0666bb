//! Propositional epistemic planning: the automaton of all solution plans.

use std::collections::BTreeSet;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::automata::{self, Dfa, Letter};
use crate::del::{EpistemicModel, EventModel};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::regular::RegularRepresentation;
use crate::sat::SatCompiler;

#[derive(Debug, Clone)]
pub struct PlanningInstance {
    pub model: EpistemicModel,
    pub initial_world: usize,
    pub events: EventModel,
    /// Indices of the events a plan may use.
    pub allowed: BTreeSet<usize>,
    pub goal: Formula,
}

impl PlanningInstance {
    pub fn new(
        model: EpistemicModel,
        initial_world: &str,
        events: EventModel,
        allowed: &[&str],
        goal: Formula,
    ) -> Result<Self> {
        let initial_world = model.world_index(initial_world)?;
        let allowed = allowed
            .iter()
            .map(|e| events.event_index(e))
            .collect::<Result<_>>()?;
        let inst = PlanningInstance {
            model,
            initial_world,
            events,
            allowed,
            goal,
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Instance with every event allowed.
    pub fn with_all_events(
        model: EpistemicModel,
        initial_world: &str,
        events: EventModel,
        goal: Formula,
    ) -> Result<Self> {
        let names: Vec<String> = events.events().to_vec();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        Self::new(model, initial_world, events, &refs, goal)
    }

    pub fn validate(&self) -> Result<()> {
        self.events.require_propositional()?;
        self.goal.validate(self.model.signature())?;
        if self.initial_world >= self.model.num_worlds() {
            return Err(Error::UnknownWorld(format!("#{}", self.initial_world)));
        }
        if let Some(e) = self
            .allowed
            .iter()
            .find(|&&e| e >= self.events.num_events())
        {
            return Err(Error::UnknownEvent(format!("#{e}")));
        }
        Ok(())
    }

    /// `|M| + |E| + |E'| + |φ| + |AP|`.
    pub fn size(&self) -> usize {
        self.model.size()
            + self.events.size()
            + self.allowed.len()
            + self.goal.size()
            + self.model.signature().props().len()
    }

    fn fingerprint(&self) -> String {
        let m = &self.model;
        let ev = &self.events;
        let sig = m.signature();
        let mut text = String::new();
        text.push_str(&format!(
            "agents {:?}\nprops {:?}\n",
            sig.agents(),
            sig.props()
        ));
        for w in 0..m.num_worlds() {
            text.push_str(&format!("world {} {:?}\n", m.worlds()[w], m.valuation(w)));
            for i in 0..sig.agents().len() {
                text.push_str(&format!("  R{i} {:?}\n", m.successors(i, w)));
            }
        }
        for e in 0..ev.num_events() {
            text.push_str(&format!("event {} pre {}\n", ev.events()[e], ev.pre(e)));
            for p in 0..sig.props().len() {
                text.push_str(&format!("  post{p} {}\n", ev.post(e, p)));
            }
            for i in 0..sig.agents().len() {
                text.push_str(&format!("  R{i} {:?}\n", ev.successors(i, e)));
            }
        }
        text.push_str(&format!(
            "init {}\nallowed {:?}\ngoal {}\n",
            self.initial_world, self.allowed, self.goal
        ));
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// DFA over event letters whose language is the set of solution plans.
#[derive(Debug, Clone)]
pub struct PlanAutomaton {
    pub dfa: Dfa,
    pub instance_hash: String,
    pub max_states: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanTable {
    pub events: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<(usize, String, usize)>,
    pub instance_hash: String,
}

impl PlanAutomaton {
    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty()
    }

    pub fn accepts(&self, plan: &[&str]) -> bool {
        let al = self.dfa.alphabet();
        plan.iter()
            .map(|e| al.letter(e))
            .collect::<Option<Vec<Letter>>>()
            .is_some_and(|w| self.dfa.accepts(&w))
    }

    fn names(&self, word: &[Letter]) -> Vec<String> {
        let al = self.dfa.alphabet();
        word.iter().map(|&l| al.symbol(l).to_string()).collect()
    }

    /// Transition table with event names, for JSON export.
    pub fn table(&self, events: &[String]) -> PlanTable {
        let al = self.dfa.alphabet();
        PlanTable {
            events: events.to_vec(),
            states: self.dfa.num_states(),
            initial: self.dfa.initial(),
            accepting: (0..self.dfa.num_states())
                .filter(|&q| self.dfa.is_accepting(q))
                .collect(),
            transitions: self
                .dfa
                .transitions()
                .map(|(q, l, t)| (q, al.symbol(l).to_string(), t))
                .collect(),
            instance_hash: self.instance_hash.clone(),
        }
    }
}

/// Compiles the goal over the representation, re-roots after the initial
/// world, keeps only allowed event letters, then trims and minimizes.
pub fn synthesize_plans(inst: &PlanningInstance, max_states: usize) -> Result<PlanAutomaton> {
    inst.validate()?;
    let rep = RegularRepresentation::build(&inst.model, &inst.events)?;
    let mut compiler = SatCompiler::with_budget(&rep, max_states);
    let sat = compiler.compile(&inst.goal)?;
    let world = rep.world_letter(&inst.model.worlds()[inst.initial_world])?;
    let nw = rep.num_worlds();
    let dfa = match sat.next(sat.initial(), world) {
        Some(root) => sat
            .rerooted(root)
            .retain_letters(|l| l.index() >= nw && inst.allowed.contains(&(l.index() - nw)))
            .minimize(),
        // the initial world fails the goal and every extension of it
        None => Dfa::new(rep.alphabet().clone()),
    };
    Ok(PlanAutomaton {
        dfa,
        instance_hash: inst.fingerprint(),
        max_states,
    })
}

pub fn decide(inst: &PlanningInstance) -> Result<bool> {
    Ok(!synthesize_plans(inst, automata::DEFAULT_MAX_STATES)?.is_empty())
}

/// Shortest plan, ties broken by event declaration order.
pub fn shortest_plan(inst: &PlanningInstance) -> Result<Option<Vec<String>>> {
    let pa = synthesize_plans(inst, automata::DEFAULT_MAX_STATES)?;
    Ok(pa.shortest_plan())
}

/// Plans sorted by (length, declaration order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanList {
    pub plans: Vec<Vec<String>>,
    pub truncated: bool,
}

impl PlanAutomaton {
    pub fn shortest_plan(&self) -> Option<Vec<String>> {
        self.dfa.shortest_accepted().map(|w| self.names(&w))
    }

    pub fn enumerate(&self, max_len: usize, max_count: usize) -> PlanList {
        let (words, truncated) = self.dfa.enumerate(max_len, max_count);
        PlanList {
            plans: words.iter().map(|w| self.names(w)).collect(),
            truncated,
        }
    }
}

pub fn enumerate_plans(
    inst: &PlanningInstance,
    max_len: usize,
    max_count: usize,
) -> Result<PlanList> {
    Ok(synthesize_plans(inst, automata::DEFAULT_MAX_STATES)?.enumerate(max_len, max_count))
}

/// Renders a plan as space-separated events, `ε` for the empty plan.
pub fn render_plan(plan: &[String]) -> String {
    if plan.is_empty() {
        "ε".to_string()
    } else {
        plan.join(" ")
    }
}
