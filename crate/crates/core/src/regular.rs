//! Finite-automata representation of the forest of histories generated by
//! repeatedly applying a propositional event model to an epistemic model.
//!
//! The alphabet is worlds followed by events, in declaration order. The
//! domain automaton tracks only the current valuation after the first
//! letter, which is enough because propositional pre- and postconditions
//! depend on nothing else.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::automata::{self, Alphabet, Dfa, Letter, StateId, Transducer};
use crate::del::{iterate_levels, EpistemicModel, EventModel, History, IterateBudget};
use crate::error::{Error, Result};
use crate::formula::{Formula, Signature};

/// Domain automaton together with the valuation carried by each state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainAutomaton {
    pub dfa: Dfa,
    /// `None` for the initial state, the valuation (proposition indices)
    /// for every other state.
    pub labels: Vec<Option<BTreeSet<usize>>>,
}

fn eval_on(f: &Formula, sig: &Signature, val: &BTreeSet<usize>) -> bool {
    f.eval_with(&|p: &str| sig.prop_index(p).is_ok_and(|i| val.contains(&i)))
        .expect("event model checked propositional")
}

fn history_alphabet(m: &EpistemicModel, ev: &EventModel) -> Result<Arc<Alphabet>> {
    Alphabet::new(m.worlds().iter().chain(ev.events()).cloned())
}

fn check_compatible(m: &EpistemicModel, ev: &EventModel) -> Result<()> {
    if m.signature() != ev.signature() {
        return Err(Error::schema(
            "event model",
            "signature differs from the epistemic model",
        ));
    }
    ev.require_propositional()
}

/// Builds the domain automaton: one initial state plus one state per
/// reachable valuation.
pub fn build_domain_automaton(m: &EpistemicModel, ev: &EventModel) -> Result<DomainAutomaton> {
    check_compatible(m, ev)?;
    let alphabet = history_alphabet(m, ev)?;
    build_domain_over(m, ev, alphabet)
}

fn build_domain_over(
    m: &EpistemicModel,
    ev: &EventModel,
    alphabet: Arc<Alphabet>,
) -> Result<DomainAutomaton> {
    let sig = m.signature();
    let nw = m.num_worlds();
    let mut dfa = Dfa::new(alphabet);
    let mut labels: Vec<Option<BTreeSet<usize>>> = vec![None];
    let mut index: HashMap<BTreeSet<usize>, StateId> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut state_for = |val: BTreeSet<usize>,
                         dfa: &mut Dfa,
                         labels: &mut Vec<Option<BTreeSet<usize>>>,
                         queue: &mut VecDeque<StateId>| {
        *index.entry(val.clone()).or_insert_with(|| {
            let q = dfa.add_state(true);
            labels.push(Some(val));
            queue.push_back(q);
            q
        })
    };

    for w in 0..nw {
        let q = state_for(m.valuation(w).clone(), &mut dfa, &mut labels, &mut queue);
        dfa.set_transition(0, Letter(w as u32), q);
    }
    while let Some(q) = queue.pop_front() {
        let val = labels[q].clone().expect("valuation state");
        for e in 0..ev.num_events() {
            if !eval_on(ev.pre(e), sig, &val) {
                continue;
            }
            let next: BTreeSet<usize> = (0..sig.props().len())
                .filter(|&p| eval_on(ev.post(e, p), sig, &val))
                .collect();
            let t = state_for(next, &mut dfa, &mut labels, &mut queue);
            dfa.set_transition(q, Letter((nw + e) as u32), t);
        }
    }

    let np = sig.props().len();
    if np < usize::BITS as usize - 1 {
        assert!(dfa.num_states() <= (1usize << np) + 1);
    }
    Ok(DomainAutomaton { dfa, labels })
}

/// Same states and transitions as the domain automaton, accepting exactly
/// the valuation states containing `prop`.
pub fn build_valuation_automaton(
    prop: &str,
    sig: &Signature,
    domain: &DomainAutomaton,
) -> Result<Dfa> {
    let p = sig.prop_index(prop)?;
    let mut dfa = domain.dfa.clone();
    for (q, label) in domain.labels.iter().enumerate() {
        dfa.set_accepting(q, label.as_ref().is_some_and(|v| v.contains(&p)));
    }
    Ok(dfa)
}

/// The one-state transducer copying agent `agent`'s world and event edges
/// letter by letter.
pub fn one_state_relation(
    agent: usize,
    m: &EpistemicModel,
    ev: &EventModel,
    alphabet: Arc<Alphabet>,
) -> Transducer {
    let nw = m.num_worlds();
    let mut pairs = Vec::new();
    for w in 0..nw {
        for &w2 in m.successors(agent, w) {
            pairs.push((Letter(w as u32), Letter(w2 as u32)));
        }
    }
    for e in 0..ev.num_events() {
        for &e2 in ev.successors(agent, e) {
            pairs.push((Letter((nw + e) as u32), Letter((nw + e2) as u32)));
        }
    }
    Transducer::one_state(alphabet, pairs)
}

/// `T_D ∘ T_i ∘ T_D`, trimmed, where `T_D` is the identity over the domain.
pub fn build_relation_transducer(
    agent: &str,
    m: &EpistemicModel,
    ev: &EventModel,
    domain: &DomainAutomaton,
) -> Result<Transducer> {
    let i = m.signature().agent_index(agent)?;
    let identity = Transducer::identity_of(&domain.dfa);
    let one = one_state_relation(i, m, ev, domain.dfa.alphabet().clone());
    Ok(identity.compose(&one)?.compose(&identity)?.trim())
}

/// Domain automaton, one valuation automaton per proposition, one relation
/// transducer per agent.
#[derive(Debug, Clone)]
pub struct RegularRepresentation {
    sig: Signature,
    alphabet: Arc<Alphabet>,
    num_worlds: usize,
    domain: DomainAutomaton,
    valuations: Vec<Dfa>,
    relations: Vec<Transducer>,
    identity_transitions: usize,
    one_state_transitions: Vec<usize>,
}

impl RegularRepresentation {
    pub fn build(m: &EpistemicModel, ev: &EventModel) -> Result<Self> {
        let domain = build_domain_automaton(m, ev)?;
        let sig = m.signature().clone();
        let alphabet = domain.dfa.alphabet().clone();
        let valuations = sig
            .props()
            .iter()
            .map(|p| build_valuation_automaton(p, &sig, &domain))
            .collect::<Result<Vec<_>>>()?;
        let relations = sig
            .agents()
            .iter()
            .map(|i| build_relation_transducer(i, m, ev, &domain))
            .collect::<Result<Vec<_>>>()?;
        let one_state_transitions = (0..sig.agents().len())
            .map(|i| one_state_relation(i, m, ev, alphabet.clone()).num_transitions())
            .collect();
        Ok(RegularRepresentation {
            identity_transitions: Transducer::identity_of(&domain.dfa).num_transitions(),
            one_state_transitions,
            num_worlds: m.num_worlds(),
            sig,
            alphabet,
            domain,
            valuations,
            relations,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn domain(&self) -> &Dfa {
        &self.domain.dfa
    }

    pub fn domain_automaton(&self) -> &DomainAutomaton {
        &self.domain
    }

    pub fn valuation(&self, prop: usize) -> &Dfa {
        &self.valuations[prop]
    }

    pub fn relation(&self, agent: usize) -> &Transducer {
        &self.relations[agent]
    }

    /// Swaps in a different domain automaton. Meant for mutation testing of
    /// [`verify_against_oracle`].
    pub fn replace_domain(&mut self, dfa: Dfa) {
        self.domain.dfa = dfa;
    }

    pub fn num_worlds(&self) -> usize {
        self.num_worlds
    }

    pub fn is_world_letter(&self, l: Letter) -> bool {
        l.index() < self.num_worlds
    }

    pub fn is_event_letter(&self, l: Letter) -> bool {
        !self.is_world_letter(l)
    }

    pub fn world_letter(&self, world: &str) -> Result<Letter> {
        self.alphabet
            .letter(world)
            .filter(|&l| self.is_world_letter(l))
            .ok_or_else(|| Error::UnknownWorld(world.to_string()))
    }

    pub fn event_letter(&self, event: &str) -> Result<Letter> {
        self.alphabet
            .letter(event)
            .filter(|&l| self.is_event_letter(l))
            .ok_or_else(|| Error::UnknownEvent(event.to_string()))
    }

    pub fn event_letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.alphabet.letters().filter(|&l| self.is_event_letter(l))
    }

    pub fn word_of(&self, h: &History) -> Result<Vec<Letter>> {
        let mut w = vec![self.world_letter(&h.world)?];
        for e in &h.events {
            w.push(self.event_letter(e)?);
        }
        Ok(w)
    }

    /// `None` unless the word is a world followed by events.
    pub fn history_of(&self, word: &[Letter]) -> Option<History> {
        let (&first, rest) = word.split_first()?;
        if !self.is_world_letter(first) || rest.iter().any(|&l| self.is_world_letter(l)) {
            return None;
        }
        Some(History {
            world: self.alphabet.symbol(first).to_string(),
            events: rest
                .iter()
                .map(|&l| self.alphabet.symbol(l).to_string())
                .collect(),
        })
    }

    pub fn contains(&self, h: &History) -> bool {
        self.word_of(h).is_ok_and(|w| self.domain.dfa.accepts(&w))
    }

    pub fn size_report(&self) -> SizeReport {
        SizeReport {
            domain: (
                self.domain.dfa.num_states(),
                self.domain.dfa.num_transitions(),
            ),
            valuations: self
                .sig
                .props()
                .iter()
                .zip(&self.valuations)
                .map(|(p, d)| (p.clone(), d.num_states(), d.num_transitions()))
                .collect(),
            relations: self
                .sig
                .agents()
                .iter()
                .zip(&self.relations)
                .zip(&self.one_state_transitions)
                .map(|((a, t), &one)| RelationSize {
                    agent: a.clone(),
                    states: t.num_states(),
                    transitions: t.num_transitions(),
                    one_state_transitions: one,
                })
                .collect(),
            identity_transitions: self.identity_transitions,
        }
    }

    /// `(file name, contents)` for every automaton of the representation.
    pub fn dot_files(&self) -> Vec<(String, String)> {
        let mut out = vec![("domain.dot".to_string(), self.domain.dfa.to_dot("domain"))];
        for (p, d) in self.sig.props().iter().zip(&self.valuations) {
            out.push((format!("val_{p}.dot"), d.to_dot(&format!("val_{p}"))));
        }
        for (a, t) in self.sig.agents().iter().zip(&self.relations) {
            out.push((format!("rel_{a}.dot"), t.to_dot(&format!("rel_{a}"))));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSize {
    pub agent: String,
    pub states: usize,
    pub transitions: usize,
    pub one_state_transitions: usize,
}

/// States and transitions of each component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeReport {
    pub domain: (usize, usize),
    pub valuations: Vec<(String, usize, usize)>,
    pub relations: Vec<RelationSize>,
    /// Transitions of the identity transducer over the domain.
    pub identity_transitions: usize,
}

impl SizeReport {
    /// Transitions summed over all components.
    pub fn total(&self) -> usize {
        self.domain.1
            + self.valuations.iter().map(|v| v.2).sum::<usize>()
            + self.relations.iter().map(|r| r.transitions).sum::<usize>()
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "component\tstates\ttransitions")?;
        writeln!(f, "domain\t{}\t{}", self.domain.0, self.domain.1)?;
        for (p, s, t) in &self.valuations {
            writeln!(f, "val[{p}]\t{s}\t{t}")?;
        }
        for r in &self.relations {
            writeln!(f, "rel[{}]\t{}\t{}", r.agent, r.states, r.transitions)?;
        }
        writeln!(f, "total\t-\t{}", self.total())
    }
}

/// First disagreement found between the automata and explicit products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Discrepancy {
    Domain {
        word: String,
        accepted: bool,
    },
    Valuation {
        word: String,
        prop: String,
        accepted: bool,
    },
    Relation {
        agent: String,
        from: String,
        to: String,
        accepted: bool,
    },
}

impl fmt::Display for Discrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let yes = |b: &bool| if *b { "accepted" } else { "rejected" };
        match self {
            Discrepancy::Domain { word, accepted } => {
                write!(f, "domain: `{word}` {} by the automaton", yes(accepted))
            }
            Discrepancy::Valuation {
                word,
                prop,
                accepted,
            } => {
                write!(
                    f,
                    "valuation of {prop}: `{word}` {} by the automaton",
                    yes(accepted)
                )
            }
            Discrepancy::Relation {
                agent,
                from,
                to,
                accepted,
            } => write!(
                f,
                "relation of {agent}: (`{from}`, `{to}`) {} by the transducer",
                yes(accepted)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleReport {
    Ok { levels: usize, histories: usize },
    Counterexample(Discrepancy),
}

impl OracleReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, OracleReport::Ok { .. })
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleReport::Ok { levels, histories } => {
                write!(f, "ok ({levels} levels, {histories} histories)")
            }
            OracleReport::Counterexample(d) => write!(f, "counterexample: {d}"),
        }
    }
}

/// Compares the representation level by level with the explicit iterated
/// products up to `depth` events: domain words, valuations and relation
/// pairs must coincide exactly.
pub fn verify_against_oracle(
    rep: &RegularRepresentation,
    m: &EpistemicModel,
    ev: &EventModel,
    depth: usize,
    budget: IterateBudget,
) -> Result<OracleReport> {
    let levels = iterate_levels(m, ev, depth, budget)?;
    let al = rep.alphabet();
    let render = |w: &[Letter]| al.render(w);
    let mut histories = 0;

    let first_tapes: Vec<Dfa> = rep
        .relations
        .iter()
        .map(|t| automata::determinize(&t.projection(true), automata::DEFAULT_MAX_STATES))
        .collect::<Result<_>>()?;
    let second_tapes: Vec<Dfa> = rep
        .relations
        .iter()
        .map(|t| automata::determinize(&t.projection(false), automata::DEFAULT_MAX_STATES))
        .collect::<Result<_>>()?;

    for (n, level) in levels.iter().enumerate() {
        let words: Vec<Vec<Letter>> = (0..level.num_worlds())
            .map(|w| rep.word_of(level.history(w)))
            .collect::<Result<_>>()?;
        let expected: BTreeSet<&Vec<Letter>> = words.iter().collect();
        histories += words.len();

        let accepted: BTreeSet<Vec<Letter>> =
            rep.domain().words_of_length(n + 1).into_iter().collect();
        if let Some(w) = accepted.iter().find(|w| !expected.contains(w)) {
            return Ok(OracleReport::Counterexample(Discrepancy::Domain {
                word: render(w),
                accepted: true,
            }));
        }
        if let Some(w) = words.iter().find(|w| !accepted.contains(*w)) {
            return Ok(OracleReport::Counterexample(Discrepancy::Domain {
                word: render(w),
                accepted: false,
            }));
        }

        for (p, prop) in rep.sig.props().iter().enumerate() {
            let truth: BTreeSet<&Vec<Letter>> = (0..level.num_worlds())
                .filter(|&w| level.holds(w, p))
                .map(|w| &words[w])
                .collect();
            let acc: BTreeSet<Vec<Letter>> = rep.valuations[p]
                .words_of_length(n + 1)
                .into_iter()
                .collect();
            if let Some(w) = acc.iter().find(|w| !truth.contains(w)) {
                return Ok(OracleReport::Counterexample(Discrepancy::Valuation {
                    word: render(w),
                    prop: prop.clone(),
                    accepted: true,
                }));
            }
            if let Some(w) = truth.iter().find(|w| !acc.contains(**w)) {
                return Ok(OracleReport::Counterexample(Discrepancy::Valuation {
                    word: render(w),
                    prop: prop.clone(),
                    accepted: false,
                }));
            }
        }

        for (i, agent) in rep.sig.agents().iter().enumerate() {
            let t = &rep.relations[i];
            // no pair may leave the level's histories on either tape
            for tape in [&first_tapes[i], &second_tapes[i]] {
                if let Some(w) = tape
                    .words_of_length(n + 1)
                    .iter()
                    .find(|w| !expected.contains(w))
                {
                    let image = t.image(w);
                    let (from, to) = match image.iter().next() {
                        Some(v) => (render(w), render(v)),
                        None => (render(w), String::from("?")),
                    };
                    return Ok(OracleReport::Counterexample(Discrepancy::Relation {
                        agent: agent.clone(),
                        from,
                        to,
                        accepted: true,
                    }));
                }
            }
            for (w, u) in words.iter().enumerate() {
                let image = t.image(u);
                let truth: BTreeSet<&Vec<Letter>> =
                    level.successors(i, w).iter().map(|&v| &words[v]).collect();
                if let Some(v) = image.iter().find(|v| !truth.contains(v)) {
                    return Ok(OracleReport::Counterexample(Discrepancy::Relation {
                        agent: agent.clone(),
                        from: render(u),
                        to: render(v),
                        accepted: true,
                    }));
                }
                if let Some(v) = truth.iter().find(|v| !image.contains(**v)) {
                    return Ok(OracleReport::Counterexample(Discrepancy::Relation {
                        agent: agent.clone(),
                        from: render(u),
                        to: render(v),
                        accepted: false,
                    }));
                }
            }
        }
    }
    Ok(OracleReport::Ok {
        levels: depth + 1,
        histories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::del::fixtures::{e0, m0};

    fn rep() -> RegularRepresentation {
        RegularRepresentation::build(&m0(), &e0()).unwrap()
    }

    fn word(r: &RegularRepresentation, s: &str) -> Vec<Letter> {
        r.alphabet().word(s).unwrap()
    }

    #[test]
    fn domain_of_m0_e0() {
        let r = rep();
        // q_init, q_{p}, q_{}
        assert_eq!(r.domain().num_states(), 3);
        assert!(r.domain().accepts(&word(&r, "w1 e2")));
        assert!(!r.domain().accepts(&word(&r, "w2 e2")));
        assert!(r.domain().accepts(&word(&r, "w2 e1 e2")));
        assert!(!r.domain().accepts(&word(&r, "e1")));
        assert!(!r.domain().accepts(&[]));
    }

    #[test]
    fn valuation_automata() {
        let r = rep();
        assert_eq!(r.valuation(0).num_states(), r.domain().num_states());
        assert!(!r.valuation(0).accepts(&word(&r, "w2")));
        assert!(r.valuation(0).accepts(&word(&r, "w2 e1")));
    }

    #[test]
    fn never_true_proposition_has_empty_language() {
        let sig = Signature::new(["a"], ["p", "q"]).unwrap();
        let m = EpistemicModel::new(sig.clone(), ["w"]).unwrap();
        let ev = EventModel::new(sig, ["e"]).unwrap();
        let r = RegularRepresentation::build(&m, &ev).unwrap();
        assert!(r.valuation(1).is_empty());
    }

    #[test]
    fn relation_transducer_of_m0_e0() {
        let r = rep();
        let t = r.relation(0);
        assert!(t.accepts_pair(&word(&r, "w1 e1"), &word(&r, "w2 e1")));
        assert!(!t.accepts_pair(&word(&r, "w1 e2"), &word(&r, "w2 e2")));
        assert!(!t.accepts_pair(&word(&r, "w1 e1"), &word(&r, "w2 e2")));
        let report = r.size_report();
        let rel = &report.relations[0];
        assert!(rel.transitions <= report.identity_transitions.pow(2) * rel.one_state_transitions);
    }

    #[test]
    fn empty_relations_give_empty_transducer() {
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let m = EpistemicModel::new(sig.clone(), ["w"]).unwrap();
        let ev = EventModel::new(sig, ["e"]).unwrap();
        let r = RegularRepresentation::build(&m, &ev).unwrap();
        assert_eq!(r.relation(0).num_transitions(), 0);
    }

    #[test]
    fn rejects_non_propositional_events() {
        let mut ev = e0();
        ev.set_pre("e2", "K[a] p".parse().unwrap()).unwrap();
        assert!(matches!(
            RegularRepresentation::build(&m0(), &ev),
            Err(Error::NonPropositional { .. })
        ));
    }

    #[test]
    fn oracle_agrees_on_m0_e0() {
        let r = rep();
        let b = IterateBudget::default();
        assert!(verify_against_oracle(&r, &m0(), &e0(), 0, b)
            .unwrap()
            .is_ok());
        assert_eq!(
            verify_against_oracle(&r, &m0(), &e0(), 3, b).unwrap(),
            OracleReport::Ok {
                levels: 4,
                histories: 2 + 3 + 6 + 12
            }
        );
    }

    #[test]
    fn oracle_catches_a_removed_transition() {
        let mut r = rep();
        let mut d = r.domain().clone();
        let q = d.run(&word(&r, "w2")).unwrap();
        d.remove_transition(q, r.event_letter("e1").unwrap());
        r.replace_domain(d);
        let report = verify_against_oracle(&r, &m0(), &e0(), 2, IterateBudget::default()).unwrap();
        assert_eq!(
            report,
            OracleReport::Counterexample(Discrepancy::Domain {
                word: "w2 e1".into(),
                accepted: false
            })
        );
    }

    #[test]
    fn histories_round_trip_through_words() {
        let r = rep();
        let h = History::parse_dotted("w2.e1.e2").unwrap();
        assert_eq!(r.history_of(&r.word_of(&h).unwrap()), Some(h));
        assert_eq!(r.history_of(&word(&r, "e1 w1")), None);
    }
}
