//! Epistemic protocol synthesis for goals `NOW α`, `AG α`, `AF α`, `EF α`
//! and `EG α`, with `α` an epistemic state formula.
//!
//! `α` is compiled once against the whole representation, so knowledge is
//! evaluated over the full universe of histories and never over the
//! protocol being built. The fixpoints then run on the finite product of
//! the domain automaton with the compiled automaton.

use std::collections::{HashMap, VecDeque};

use crate::automata::{self, Dfa, Letter, StateId};
use crate::error::{Error, Result};
use crate::formula::{GoalFormula, GoalHead};
use crate::regular::RegularRepresentation;
use crate::sat::SatCompiler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisOptions {
    /// Require every protocol node to have a child. `None` picks the
    /// default: on for `AG`/`EG`, off otherwise.
    pub serial: Option<bool>,
    pub max_states: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            serial: None,
            max_states: automata::DEFAULT_MAX_STATES,
        }
    }
}

impl SynthesisOptions {
    pub fn serial_for(&self, head: GoalHead) -> bool {
        self.serial.unwrap_or(matches!(
            head,
            GoalHead::AlwaysGlobally | GoalHead::ExistsGlobally
        ))
    }
}

/// Product of the domain automaton with the automaton for `α`, explored
/// from one root world along event letters.
#[derive(Debug, Clone)]
pub struct ArenaGraph {
    pub root_letter: Letter,
    /// `(domain state, α-automaton state)`; the second component is `None`
    /// once the α-automaton has no transition left.
    pub nodes: Vec<(StateId, Option<StateId>)>,
    pub marked: Vec<bool>,
    /// Successors in letter order.
    pub succ: Vec<Vec<(Letter, usize)>>,
}

impl ArenaGraph {
    /// Root is node 0.
    pub fn build(rep: &RegularRepresentation, alpha: &Dfa, root_world: &str) -> Result<Self> {
        let w = rep.world_letter(root_world)?;
        let dom = rep.domain();
        let d0 = dom
            .next(dom.initial(), w)
            .expect("every world has a valuation state");
        let s0 = alpha.next(alpha.initial(), w);
        let mut g = ArenaGraph {
            root_letter: w,
            nodes: Vec::new(),
            marked: Vec::new(),
            succ: Vec::new(),
        };
        let mut index: HashMap<(StateId, Option<StateId>), usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut add =
            |g: &mut ArenaGraph, key: (StateId, Option<StateId>), queue: &mut VecDeque<usize>| {
                *index.entry(key).or_insert_with(|| {
                    g.nodes.push(key);
                    g.marked.push(key.1.is_some_and(|s| alpha.is_accepting(s)));
                    g.succ.push(Vec::new());
                    queue.push_back(g.nodes.len() - 1);
                    g.nodes.len() - 1
                })
            };
        add(&mut g, (d0, s0), &mut queue);
        while let Some(v) = queue.pop_front() {
            let (d, s) = g.nodes[v];
            let moves: Vec<(Letter, StateId)> = dom.successors(d).collect();
            for (l, d2) in moves {
                let s2 = s.and_then(|s| alpha.next(s, l));
                let u = add(&mut g, (d2, s2), &mut queue);
                g.succ[v].push((l, u));
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest subset of `within` in which every node has a successor
    /// inside the subset.
    pub fn greatest_serial_subset(&self, within: &[bool]) -> Vec<bool> {
        let mut set = within.to_vec();
        loop {
            let mut changed = false;
            for v in 0..self.len() {
                if set[v] && !self.succ[v].iter().any(|&(_, u)| set[u]) {
                    set[v] = false;
                    changed = true;
                }
            }
            if !changed {
                return set;
            }
        }
    }

    /// Distance from each node to `targets` (least fixpoint, computed
    /// backwards breadth-first); `None` outside the attractor.
    pub fn attractor_ranks(&self, targets: &[bool]) -> Vec<Option<usize>> {
        let n = self.len();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            for &(_, u) in &self.succ[v] {
                preds[u].push(v);
            }
        }
        let mut rank: Vec<Option<usize>> = vec![None; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if targets[v] {
                rank[v] = Some(0);
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            let r = rank[u].expect("ranked");
            for &v in &preds[u] {
                if rank[v].is_none() {
                    rank[v] = Some(r + 1);
                    queue.push_back(v);
                }
            }
        }
        rank
    }

    fn first_successor_in(&self, v: usize, set: &[bool]) -> Option<(Letter, usize)> {
        self.succ[v].iter().copied().find(|&(_, u)| set[u])
    }
}

/// A regular, rooted, prefix-closed set of histories.
#[derive(Debug, Clone)]
pub struct ProtocolAutomaton {
    pub dfa: Dfa,
    pub root: String,
    pub goal: GoalFormula,
    pub serial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Phase {
    Seek,
    Done,
}

/// Unfolds `edges` from the root into a DFA whose non-initial states are
/// all accepting.
fn unfold(
    g: &ArenaGraph,
    alphabet: std::sync::Arc<crate::automata::Alphabet>,
    root_phase: Phase,
    edges: impl Fn(usize, Phase) -> Vec<(Letter, usize, Phase)>,
) -> Dfa {
    let mut dfa = Dfa::new(alphabet);
    let root = dfa.add_state(true);
    dfa.set_transition(0, g.root_letter, root);
    let mut index = HashMap::from([((0usize, root_phase), root)]);
    let mut queue = VecDeque::from([(0usize, root_phase)]);
    while let Some((v, ph)) = queue.pop_front() {
        let src = index[&(v, ph)];
        for (l, u, ph2) in edges(v, ph) {
            let dst = *index.entry((u, ph2)).or_insert_with(|| {
                queue.push_back((u, ph2));
                dfa.add_state(true)
            });
            dfa.set_transition(src, l, dst);
        }
    }
    dfa.minimize()
}

/// Synthesizes a protocol rooted at `root_world` satisfying `goal`, or
/// `None` when no protocol exists.
pub fn synthesize_protocol(
    rep: &RegularRepresentation,
    root_world: &str,
    goal: &GoalFormula,
    opts: SynthesisOptions,
) -> Result<Option<ProtocolAutomaton>> {
    goal.body.validate(rep.signature())?;
    let alpha = SatCompiler::with_budget(rep, opts.max_states).compile(&goal.body)?;
    let g = ArenaGraph::build(rep, &alpha, root_world)?;
    let serial = opts.serial_for(goal.head);
    let all = vec![true; g.len()];
    let core = g.greatest_serial_subset(&all);
    let alphabet = rep.alphabet().clone();

    // continuation once the goal is settled: a single lasso inside the
    // serial core, or nothing
    let settle = |v: usize| -> Vec<(Letter, usize, Phase)> {
        if serial {
            g.first_successor_in(v, &core)
                .map(|(l, u)| vec![(l, u, Phase::Done)])
                .unwrap_or_default()
        } else {
            Vec::new()
        }
    };

    let dfa = match goal.head {
        GoalHead::Now => {
            if !g.marked[0] || (serial && !core[0]) {
                return Ok(None);
            }
            unfold(&g, alphabet, Phase::Done, |v, _| settle(v))
        }
        GoalHead::AlwaysGlobally => {
            let safe = if serial {
                g.greatest_serial_subset(&g.marked)
            } else {
                g.marked.clone()
            };
            if !safe[0] {
                return Ok(None);
            }
            unfold(&g, alphabet, Phase::Seek, |v, ph| {
                g.succ[v]
                    .iter()
                    .filter(|&&(_, u)| safe[u])
                    .map(|&(l, u)| (l, u, ph))
                    .collect()
            })
        }
        GoalHead::ExistsFinally | GoalHead::AlwaysFinally => {
            let targets: Vec<bool> = (0..g.len())
                .map(|v| g.marked[v] && (!serial || core[v]))
                .collect();
            let rank = g.attractor_ranks(&targets);
            if rank[0].is_none() {
                return Ok(None);
            }
            let all_branches = goal.head == GoalHead::AlwaysFinally;
            unfold(&g, alphabet, Phase::Seek, |v, ph| {
                if ph == Phase::Done || targets[v] {
                    return settle(v);
                }
                let r = rank[v].expect("inside the attractor");
                let closer = g.succ[v]
                    .iter()
                    .filter(|&&(_, u)| rank[u].is_some_and(|ru| ru < r))
                    .map(|&(l, u)| (l, u, Phase::Seek));
                if all_branches {
                    closer.collect()
                } else {
                    closer.take(1).collect()
                }
            })
        }
        GoalHead::ExistsGlobally => {
            let lasting = g.greatest_serial_subset(&g.marked);
            if !lasting[0] && (serial || !g.marked[0]) {
                return Ok(None);
            }
            unfold(&g, alphabet, Phase::Seek, |v, ph| {
                if !lasting[v] {
                    return Vec::new();
                }
                g.first_successor_in(v, &lasting)
                    .map(|(l, u)| vec![(l, u, ph)])
                    .unwrap_or_default()
            })
        }
    };

    Ok(Some(ProtocolAutomaton {
        dfa,
        root: root_world.to_string(),
        goal: goal.clone(),
        serial,
    }))
}

impl ProtocolAutomaton {
    /// Protocol histories with at most `depth` events, as space-separated
    /// words in (length, letter) order.
    pub fn words(&self, depth: usize) -> Vec<String> {
        let (words, _) = self.dfa.enumerate(depth + 1, usize::MAX);
        words
            .iter()
            .map(|w| self.dfa.alphabet().render(w))
            .collect()
    }

    /// Removes every history extending `prefix` (a space-separated word).
    pub fn without_branch(&self, prefix: &str) -> Result<ProtocolAutomaton> {
        let al = self.dfa.alphabet().clone();
        let word = al
            .word(prefix)
            .ok_or_else(|| Error::MalformedProtocol(format!("unknown letter in `{prefix}`")))?;
        let mut cone = Dfa::new(al.clone());
        let mut q = 0;
        for &l in &word {
            let next = cone.add_state(false);
            cone.set_transition(q, l, next);
            q = next;
        }
        cone.set_accepting(q, true);
        for l in al.letters() {
            cone.set_transition(q, l, q);
        }
        Ok(ProtocolAutomaton {
            dfa: automata::complement_within(&cone, &self.dfa)?.minimize(),
            ..self.clone()
        })
    }

    /// Checks the structural invariants: rooted at a single world, prefix
    /// closed, inside the domain.
    pub fn validate(&self, rep: &RegularRepresentation) -> Result<()> {
        let d = self.dfa.trim();
        if d.is_empty() {
            return Err(Error::MalformedProtocol("empty protocol".into()));
        }
        if d.is_accepting(d.initial()) {
            return Err(Error::MalformedProtocol("contains the empty word".into()));
        }
        let first: Vec<(Letter, StateId)> = d.successors(d.initial()).collect();
        let root = rep.world_letter(&self.root)?;
        if first.len() != 1 || first[0].0 != root {
            return Err(Error::MalformedProtocol(format!(
                "not rooted in `{}`",
                self.root
            )));
        }
        if (0..d.num_states()).any(|q| q != d.initial() && !d.is_accepting(q)) {
            return Err(Error::MalformedProtocol("not prefix-closed".into()));
        }
        if !automata::complement_within(rep.domain(), &d)?.is_empty() {
            return Err(Error::MalformedProtocol("leaves the domain".into()));
        }
        Ok(())
    }
}

/// Verifies a protocol independently of how it was synthesized: unfolds the
/// protocol tree to `depth` events, decides `α` at each node through
/// [`SatCompiler::holds_at_word`] and model-checks the goal on the
/// truncated tree. Within the horizon this never accepts an `AG`/`EG`
/// violation, and is exact for `EF`/`AF` when the goal is reached within
/// `depth` events.
pub fn check_protocol(
    pa: &ProtocolAutomaton,
    goal: &GoalFormula,
    rep: &RegularRepresentation,
    depth: usize,
) -> Result<bool> {
    pa.validate(rep)?;
    let mut sat = SatCompiler::new(rep);
    let d = pa.dfa.trim();
    let root_letter = rep.world_letter(&pa.root)?;
    let root = d.next(d.initial(), root_letter).expect("validated");

    struct Node {
        alpha: bool,
        children: Vec<usize>,
        has_children: bool,
    }
    let mut nodes: Vec<Node> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn unfold(
        d: &Dfa,
        sat: &mut SatCompiler<'_>,
        body: &crate::formula::Formula,
        nodes: &mut Vec<Node>,
        q: StateId,
        word: &mut Vec<Letter>,
        level: usize,
        depth: usize,
    ) -> Result<usize> {
        let alpha = sat.holds_at_word(body, word)?;
        let id = nodes.len();
        let succ: Vec<(Letter, StateId)> = d.successors(q).collect();
        nodes.push(Node {
            alpha,
            children: Vec::new(),
            has_children: !succ.is_empty(),
        });
        if level < depth {
            for (l, t) in succ {
                word.push(l);
                let c = unfold(d, sat, body, nodes, t, word, level + 1, depth)?;
                word.pop();
                nodes[id].children.push(c);
            }
        }
        Ok(id)
    }

    let mut word = vec![root_letter];
    unfold(
        &d, &mut sat, &goal.body, &mut nodes, root, &mut word, 0, depth,
    )?;

    if pa.serial && nodes.iter().any(|n| !n.has_children) {
        return Ok(false);
    }

    fn af(nodes: &[Node], v: usize) -> bool {
        let n = &nodes[v];
        n.alpha || (!n.children.is_empty() && n.children.iter().all(|&c| af(nodes, c)))
    }
    fn eg(nodes: &[Node], v: usize, level: usize, depth: usize) -> bool {
        let n = &nodes[v];
        n.alpha
            && (level == depth
                || !n.has_children
                || n.children.iter().any(|&c| eg(nodes, c, level + 1, depth)))
    }

    Ok(match goal.head {
        GoalHead::Now => nodes[0].alpha,
        GoalHead::AlwaysGlobally => nodes.iter().all(|n| n.alpha),
        GoalHead::ExistsFinally => nodes.iter().any(|n| n.alpha),
        GoalHead::AlwaysFinally => af(&nodes, 0),
        GoalHead::ExistsGlobally => eg(&nodes, 0, 0, depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::del::fixtures::{e0, m0};

    fn rep() -> RegularRepresentation {
        RegularRepresentation::build(&m0(), &e0()).unwrap()
    }

    fn goal(s: &str) -> GoalFormula {
        s.parse().unwrap()
    }

    fn synth(g: &str) -> Option<ProtocolAutomaton> {
        synthesize_protocol(&rep(), "w1", &goal(g), SynthesisOptions::default()).unwrap()
    }

    #[test]
    fn now_goal_is_the_root_alone() {
        let pa = synth("NOW p").unwrap();
        assert_eq!(pa.words(3), vec!["w1"]);
        assert!(synth("NOW K[a] p").is_none());
        assert!(check_protocol(&pa, &goal("NOW p"), &rep(), 5).unwrap());
        assert!(!check_protocol(&pa, &goal("NOW K[a] p"), &rep(), 5).unwrap());
    }

    #[test]
    fn ef_keeps_one_witness_branch() {
        let pa = synth("EF K[a] p").unwrap();
        assert_eq!(pa.words(4), vec!["w1", "w1 e1"]);
        assert!(check_protocol(&pa, &goal("EF K[a] p"), &rep(), 5).unwrap());
        let cut = pa.without_branch("w1 e1").unwrap();
        assert_eq!(cut.words(4), vec!["w1"]);
        assert!(!check_protocol(&cut, &goal("EF K[a] p"), &rep(), 5).unwrap());
    }

    #[test]
    fn ag_false_has_no_protocol() {
        assert!(synth("AG false").is_none());
    }

    #[test]
    fn ag_p_keeps_all_p_branches() {
        let pa = synth("AG p").unwrap();
        // p holds at w1 and stays true under both events
        assert_eq!(pa.words(1), vec!["w1", "w1 e1", "w1 e2"]);
        assert!(check_protocol(&pa, &goal("AG p"), &rep(), 5).unwrap());
    }

    #[test]
    fn serial_eg_is_a_lasso() {
        let pa = synth("EG p").unwrap();
        assert_eq!(pa.words(3), vec!["w1", "w1 e1", "w1 e1 e1", "w1 e1 e1 e1"]);
        assert!(check_protocol(&pa, &goal("EG p"), &rep(), 5).unwrap());
    }

    #[test]
    fn malformed_protocols_are_rejected() {
        let pa = synth("AG p").unwrap();
        let mut bad = pa.clone();
        bad.dfa.set_accepting(bad.dfa.initial(), true);
        assert!(matches!(
            check_protocol(&bad, &goal("AG p"), &rep(), 3),
            Err(Error::MalformedProtocol(_))
        ));
    }
}
