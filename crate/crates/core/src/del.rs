//! Epistemic models, event models and the update product.
//!
//! Everything here works by explicit enumeration and serves as the ground
//! truth the automata constructions are checked against.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{check_unique, Formula, Signature};

/// A world followed by a finite sequence of events.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct History {
    pub world: String,
    pub events: Vec<String>,
}

impl History {
    pub fn new(world: impl Into<String>) -> Self {
        History {
            world: world.into(),
            events: Vec::new(),
        }
    }

    pub fn extended(&self, event: impl Into<String>) -> Self {
        let mut h = self.clone();
        h.events.push(event.into());
        h
    }

    /// Number of events.
    pub fn level(&self) -> usize {
        self.events.len()
    }

    /// Parses the dotted form `w.e1.e2`.
    pub fn parse_dotted(s: &str) -> Option<Self> {
        let mut parts = s.split('.');
        let world = parts.next().filter(|w| !w.is_empty())?;
        let events: Vec<String> = parts.map(str::to_string).collect();
        if events.iter().any(String::is_empty) {
            return None;
        }
        Some(History {
            world: world.to_string(),
            events,
        })
    }
}

impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.world)?;
        for e in &self.events {
            write!(f, ".{e}")?;
        }
        Ok(())
    }
}

/// Per-agent relation stored as sorted successor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Relation {
    succ: Vec<Vec<usize>>,
}

impl Relation {
    fn empty(n: usize) -> Self {
        Relation {
            succ: vec![Vec::new(); n],
        }
    }

    fn insert(&mut self, from: usize, to: usize) {
        let s = &mut self.succ[from];
        if let Err(pos) = s.binary_search(&to) {
            s.insert(pos, to);
        }
    }

    fn contains(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    fn len(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpistemicModel {
    sig: Signature,
    worlds: Vec<String>,
    relations: Vec<Relation>,
    valuation: Vec<BTreeSet<usize>>,
    point: Option<usize>,
    histories: Vec<History>,
}

impl EpistemicModel {
    pub fn new<W>(sig: Signature, worlds: W) -> Result<Self>
    where
        W: IntoIterator,
        W::Item: Into<String>,
    {
        let worlds: Vec<String> = worlds.into_iter().map(Into::into).collect();
        check_unique(&worlds)?;
        let n = worlds.len();
        Ok(EpistemicModel {
            relations: vec![Relation::empty(n); sig.agents().len()],
            valuation: vec![BTreeSet::new(); n],
            point: None,
            histories: worlds.iter().map(History::new).collect(),
            worlds,
            sig,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn num_worlds(&self) -> usize {
        self.worlds.len()
    }

    pub fn world_index(&self, name: &str) -> Result<usize> {
        self.worlds
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| Error::UnknownWorld(name.to_string()))
    }

    /// The history a world stands for: the world itself in a base model,
    /// `w.e1...en` in an iterated product.
    pub fn history(&self, world: usize) -> &History {
        &self.histories[world]
    }

    pub fn point(&self) -> Option<usize> {
        self.point
    }

    pub fn set_point(&mut self, world: &str) -> Result<()> {
        self.point = Some(self.world_index(world)?);
        Ok(())
    }

    pub fn set_true(&mut self, world: &str, prop: &str) -> Result<()> {
        let w = self.world_index(world)?;
        let p = self.sig.prop_index(prop)?;
        self.valuation[w].insert(p);
        Ok(())
    }

    pub fn add_edge(&mut self, agent: &str, from: &str, to: &str) -> Result<()> {
        let i = self.sig.agent_index(agent)?;
        let (a, b) = (self.world_index(from)?, self.world_index(to)?);
        self.relations[i].insert(a, b);
        Ok(())
    }

    /// Indices of the propositions true at `world`.
    pub fn valuation(&self, world: usize) -> &BTreeSet<usize> {
        &self.valuation[world]
    }

    pub fn holds(&self, world: usize, prop: usize) -> bool {
        self.valuation[world].contains(&prop)
    }

    pub fn successors(&self, agent: usize, world: usize) -> &[usize] {
        &self.relations[agent].succ[world]
    }

    pub fn related(&self, agent: usize, from: usize, to: usize) -> bool {
        self.relations[agent].contains(from, to)
    }

    /// Number of edges summed over agents.
    pub fn size(&self) -> usize {
        self.relations.iter().map(Relation::len).sum()
    }

    /// Truth value of `f` at every world.
    pub fn truth_set(&self, f: &Formula) -> Result<Vec<bool>> {
        let n = self.worlds.len();
        Ok(match f {
            Formula::True => vec![true; n],
            Formula::False => vec![false; n],
            Formula::Atom(p) => {
                let p = self.sig.prop_index(p)?;
                (0..n).map(|w| self.holds(w, p)).collect()
            }
            Formula::Not(g) => self.truth_set(g)?.into_iter().map(|b| !b).collect(),
            Formula::Or(a, b) => zip_with(self.truth_set(a)?, self.truth_set(b)?, |x, y| x | y),
            Formula::And(a, b) => zip_with(self.truth_set(a)?, self.truth_set(b)?, |x, y| x & y),
            Formula::Implies(a, b) => {
                zip_with(self.truth_set(a)?, self.truth_set(b)?, |x, y| !x | y)
            }
            Formula::Know(i, g) => {
                let i = self.sig.agent_index(i)?;
                let inner = self.truth_set(g)?;
                (0..n)
                    .map(|w| self.successors(i, w).iter().all(|&v| inner[v]))
                    .collect()
            }
        })
    }

    /// Truth of `f` at the named world.
    pub fn check(&self, world: &str, f: &Formula) -> Result<bool> {
        let w = self.world_index(world)?;
        Ok(self.truth_set(f)?[w])
    }
}

fn zip_with(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventModel {
    sig: Signature,
    events: Vec<String>,
    relations: Vec<Relation>,
    pre: Vec<Formula>,
    /// `post[e][p]`; the identity postcondition is the atom `p` itself.
    post: Vec<Vec<Formula>>,
}

impl EventModel {
    /// Events start with precondition `true` and identity postconditions.
    pub fn new<E>(sig: Signature, events: E) -> Result<Self>
    where
        E: IntoIterator,
        E::Item: Into<String>,
    {
        let events: Vec<String> = events.into_iter().map(Into::into).collect();
        check_unique(&events)?;
        let n = events.len();
        let identity: Vec<Formula> = sig.props().iter().map(Formula::atom).collect();
        Ok(EventModel {
            relations: vec![Relation::empty(n); sig.agents().len()],
            pre: vec![Formula::True; n],
            post: vec![identity; n],
            events,
            sig,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn event_index(&self, name: &str) -> Result<usize> {
        self.events
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    }

    pub fn set_pre(&mut self, event: &str, f: Formula) -> Result<()> {
        let e = self.event_index(event)?;
        f.validate(&self.sig)?;
        self.pre[e] = f;
        Ok(())
    }

    pub fn set_post(&mut self, event: &str, prop: &str, f: Formula) -> Result<()> {
        let e = self.event_index(event)?;
        let p = self.sig.prop_index(prop)?;
        f.validate(&self.sig)?;
        self.post[e][p] = f;
        Ok(())
    }

    pub fn add_edge(&mut self, agent: &str, from: &str, to: &str) -> Result<()> {
        let i = self.sig.agent_index(agent)?;
        let (a, b) = (self.event_index(from)?, self.event_index(to)?);
        self.relations[i].insert(a, b);
        Ok(())
    }

    pub fn pre(&self, event: usize) -> &Formula {
        &self.pre[event]
    }

    pub fn post(&self, event: usize, prop: usize) -> &Formula {
        &self.post[event][prop]
    }

    pub fn successors(&self, agent: usize, event: usize) -> &[usize] {
        &self.relations[agent].succ[event]
    }

    pub fn related(&self, agent: usize, from: usize, to: usize) -> bool {
        self.relations[agent].contains(from, to)
    }

    pub fn is_propositional(&self) -> bool {
        self.pre.iter().all(Formula::is_propositional)
            && self.post.iter().flatten().all(Formula::is_propositional)
    }

    /// Rejects event models with a knowledge operator in any pre- or postcondition.
    pub fn require_propositional(&self) -> Result<()> {
        for (e, name) in self.events.iter().enumerate() {
            if !self.pre[e].is_propositional() {
                return Err(Error::NonPropositional {
                    what: format!("precondition of event `{name}`"),
                    formula: self.pre[e].to_string(),
                });
            }
            for (p, prop) in self.sig.props().iter().enumerate() {
                if !self.post[e][p].is_propositional() {
                    return Err(Error::NonPropositional {
                        what: format!("postcondition of event `{name}` for `{prop}`"),
                        formula: self.post[e][p].to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Edges plus the node counts of all pre- and postconditions.
    pub fn size(&self) -> usize {
        let edges: usize = self.relations.iter().map(Relation::len).sum();
        let formulas: usize = self
            .pre
            .iter()
            .zip(&self.post)
            .map(|(pre, post)| pre.size() + post.iter().map(Formula::size).sum::<usize>())
            .sum();
        edges + formulas
    }
}

/// The update product `m ⊗ ev`.
///
/// Product worlds are enumerated world-major, then by event declaration
/// order, and are named `w.e`.
pub fn product(m: &EpistemicModel, ev: &EventModel) -> Result<EpistemicModel> {
    if m.sig != ev.sig {
        return Err(Error::schema(
            "event model",
            "signature differs from the epistemic model",
        ));
    }
    let pre: Vec<Vec<bool>> = ev
        .pre
        .iter()
        .map(|f| m.truth_set(f))
        .collect::<Result<_>>()?;
    let post: Vec<Vec<Vec<bool>>> = ev
        .post
        .iter()
        .map(|fs| {
            fs.iter()
                .map(|f| m.truth_set(f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut pairs = Vec::new();
    let mut index = vec![vec![None; ev.num_events()]; m.num_worlds()];
    for w in 0..m.num_worlds() {
        for e in 0..ev.num_events() {
            if pre[e][w] {
                index[w][e] = Some(pairs.len());
                pairs.push((w, e));
            }
        }
    }

    let n = pairs.len();
    let mut relations = vec![Relation::empty(n); m.sig.agents().len()];
    for (i, rel) in relations.iter_mut().enumerate() {
        for (k, &(w, e)) in pairs.iter().enumerate() {
            for &w2 in m.successors(i, w) {
                for &e2 in ev.successors(i, e) {
                    if let Some(k2) = index[w2][e2] {
                        rel.succ[k].push(k2);
                    }
                }
            }
            rel.succ[k].sort_unstable();
        }
    }
    let valuation = pairs
        .iter()
        .map(|&(w, e)| {
            (0..m.sig.props().len())
                .filter(|&p| post[e][p][w])
                .collect()
        })
        .collect();

    Ok(EpistemicModel {
        sig: m.sig.clone(),
        worlds: pairs
            .iter()
            .map(|&(w, e)| format!("{}.{}", m.worlds[w], ev.events[e]))
            .collect(),
        histories: pairs
            .iter()
            .map(|&(w, e)| m.histories[w].extended(ev.events[e].clone()))
            .collect(),
        point: None,
        relations,
        valuation,
    })
}

/// `(m, w) ⊗ (ev, e)`: `None` when `w` does not satisfy the precondition of `e`.
pub fn pointed_product(
    m: &EpistemicModel,
    world: &str,
    ev: &EventModel,
    event: &str,
) -> Result<Option<EpistemicModel>> {
    let w = m.world_index(world)?;
    let e = ev.event_index(event)?;
    if !m.truth_set(&ev.pre[e])?[w] {
        return Ok(None);
    }
    let mut out = product(m, ev)?;
    out.point = Some(out.world_index(&format!("{world}.{event}"))?);
    Ok(Some(out))
}

/// Hard limits on explicit enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IterateBudget {
    pub max_worlds: usize,
    pub max_level: usize,
}

impl Default for IterateBudget {
    fn default() -> Self {
        IterateBudget {
            max_worlds: 1_000_000,
            max_level: 64,
        }
    }
}

/// All levels `(m ⊗ ev)^0 ..= (m ⊗ ev)^n`.
pub fn iterate_levels(
    m: &EpistemicModel,
    ev: &EventModel,
    n: usize,
    budget: IterateBudget,
) -> Result<Vec<EpistemicModel>> {
    if n > budget.max_level {
        return Err(Error::BudgetExceeded {
            what: "iteration depth".into(),
            limit: budget.max_level,
            level: Some(n),
        });
    }
    let mut levels = vec![m.clone()];
    for level in 1..=n {
        let prev = levels.last().expect("level 0 present");
        let mut count = 0usize;
        for pre in &ev.pre {
            count += prev.truth_set(pre)?.into_iter().filter(|&b| b).count();
        }
        if count > budget.max_worlds {
            return Err(Error::BudgetExceeded {
                what: "world count".into(),
                limit: budget.max_worlds,
                level: Some(level),
            });
        }
        let next = product(prev, ev)?;
        levels.push(next);
    }
    Ok(levels)
}

/// The `n`-fold iterated product `(m ⊗ ev)^n`.
pub fn iterate(
    m: &EpistemicModel,
    ev: &EventModel,
    n: usize,
    budget: IterateBudget,
) -> Result<EpistemicModel> {
    Ok(iterate_levels(m, ev, n, budget)?
        .pop()
        .expect("at least level 0"))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Two worlds, agent `a` cannot tell them apart, `p` true at `w1` only.
    pub fn m0() -> EpistemicModel {
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let mut m = EpistemicModel::new(sig, ["w1", "w2"]).unwrap();
        for x in ["w1", "w2"] {
            for y in ["w1", "w2"] {
                m.add_edge("a", x, y).unwrap();
            }
        }
        m.set_true("w1", "p").unwrap();
        m
    }

    /// `e1` publicly sets `p`; `e2` is a public test for `p`.
    pub fn e0() -> EventModel {
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let mut ev = EventModel::new(sig, ["e1", "e2"]).unwrap();
        ev.set_post("e1", "p", Formula::True).unwrap();
        ev.set_pre("e2", Formula::atom("p")).unwrap();
        ev.add_edge("a", "e1", "e1").unwrap();
        ev.add_edge("a", "e2", "e2").unwrap();
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::{e0, m0};
    use super::*;

    fn f(s: &str) -> Formula {
        s.parse().unwrap()
    }

    #[test]
    fn check_by_kripke_semantics() {
        let m = m0();
        assert!(m.check("w1", &f("p")).unwrap());
        assert!(!m.check("w1", &f("K[a] p")).unwrap());
        assert!(m.check("w1", &f("K[a](p | ~p)")).unwrap());
        assert!(matches!(
            m.check("w9", &f("p")),
            Err(Error::UnknownWorld(_))
        ));
        assert!(matches!(
            m.check("w1", &f("q")),
            Err(Error::UnknownProposition(_))
        ));
    }

    #[test]
    fn know_is_vacuous_without_successors() {
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let m = EpistemicModel::new(sig, ["w"]).unwrap();
        assert!(m.check("w", &f("K[a] false")).unwrap());
    }

    #[test]
    fn product_of_m0_e0() {
        let p = product(&m0(), &e0()).unwrap();
        assert_eq!(p.worlds(), &["w1.e1", "w1.e2", "w2.e1"]);
        // e1 makes p true everywhere, e2 keeps it
        for w in p.worlds() {
            assert!(p.check(w, &f("p")).unwrap());
        }
        assert!(p.check("w1.e1", &f("K[a] p")).unwrap());
        assert!(p.check("w1.e2", &f("K[a] p")).unwrap());
        assert_eq!(p.successors(0, 0), &[0, 2]);
        assert_eq!(p.successors(0, 1), &[1]);
        assert_eq!(p.history(2), &History::parse_dotted("w2.e1").unwrap());
    }

    #[test]
    fn false_precondition_empties_the_product() {
        let m = m0();
        let mut ev = EventModel::new(m.signature().clone(), ["e"]).unwrap();
        ev.set_pre("e", Formula::False).unwrap();
        assert_eq!(product(&m, &ev).unwrap().num_worlds(), 0);
    }

    #[test]
    fn pointed_products() {
        assert!(pointed_product(&m0(), "w2", &e0(), "e2").unwrap().is_none());
        let p = pointed_product(&m0(), "w1", &e0(), "e2").unwrap().unwrap();
        assert_eq!(p.worlds()[p.point().unwrap()], "w1.e2");
        assert!(pointed_product(&m0(), "w2", &e0(), "e1").unwrap().is_some());
    }

    #[test]
    fn iterate_levels_of_m0_e0() {
        let b = IterateBudget::default();
        assert_eq!(iterate(&m0(), &e0(), 0, b).unwrap(), m0());
        assert_eq!(
            iterate(&m0(), &e0(), 1, b).unwrap(),
            product(&m0(), &e0()).unwrap()
        );
        // level 1 has three worlds, all satisfy p, so both events apply to each
        assert_eq!(iterate(&m0(), &e0(), 2, b).unwrap().num_worlds(), 6);
        assert_eq!(iterate(&m0(), &e0(), 3, b).unwrap().num_worlds(), 12);
    }

    #[test]
    fn iterate_budget_names_the_level() {
        let b = IterateBudget {
            max_worlds: 5,
            max_level: 10,
        };
        assert_eq!(
            iterate(&m0(), &e0(), 3, b).unwrap_err(),
            Error::BudgetExceeded {
                what: "world count".into(),
                limit: 5,
                level: Some(2)
            }
        );
    }

    #[test]
    fn sizes() {
        assert_eq!(m0().size(), 4);
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let mut ev = EventModel::new(sig.clone(), ["e"]).unwrap();
        ev.add_edge("a", "e", "e").unwrap();
        assert_eq!(ev.size(), 3);
        let empty_m = EpistemicModel::new(sig.clone(), Vec::<String>::new()).unwrap();
        let empty_e = EventModel::new(sig, Vec::<String>::new()).unwrap();
        assert_eq!(empty_m.size() + empty_e.size(), 0);
    }

    #[test]
    fn rejects_epistemic_preconditions() {
        let mut ev = e0();
        ev.set_pre("e2", f("K[a] p")).unwrap();
        assert!(!ev.is_propositional());
        assert!(matches!(
            ev.require_propositional(),
            Err(Error::NonPropositional { .. })
        ));
    }
}
