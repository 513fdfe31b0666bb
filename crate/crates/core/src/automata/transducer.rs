use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::{same_alphabet, Alphabet, Dfa, Letter, Nfa, StateId};
use crate::error::Result;

/// Letter-synchronous two-tape automaton: every transition reads one letter
/// from each tape, so it only relates words of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    alphabet: Arc<Alphabet>,
    initial: StateId,
    accepting: Vec<bool>,
    /// Per state, sorted `(input, output, target)` triples.
    trans: Vec<Vec<(Letter, Letter, StateId)>>,
}

impl Transducer {
    /// `states` states, state 0 initial, none accepting.
    pub fn new(alphabet: Arc<Alphabet>, states: usize) -> Self {
        assert!(states > 0, "a transducer needs an initial state");
        Transducer {
            alphabet,
            initial: 0,
            accepting: vec![false; states],
            trans: vec![Vec::new(); states],
        }
    }

    /// One accepting state looping on every given letter pair.
    pub fn one_state(
        alphabet: Arc<Alphabet>,
        pairs: impl IntoIterator<Item = (Letter, Letter)>,
    ) -> Self {
        let mut t = Transducer::new(alphabet, 1);
        t.accepting[0] = true;
        for (a, b) in pairs {
            t.add_transition(0, a, b, 0);
        }
        t
    }

    /// The identity relation over `L(d)`.
    pub fn identity_of(d: &Dfa) -> Self {
        let mut t = Transducer::new(d.alphabet().clone(), d.num_states());
        t.initial = d.initial();
        for q in 0..d.num_states() {
            t.accepting[q] = d.is_accepting(q);
        }
        for (q, l, r) in d.transitions() {
            t.add_transition(q, l, l, r);
        }
        t
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    /// Size of the transition relation.
    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_transition(&mut self, from: StateId, input: Letter, output: Letter, to: StateId) {
        let t = &mut self.trans[from];
        if let Err(pos) = t.binary_search(&(input, output, to)) {
            t.insert(pos, (input, output, to));
        }
    }

    pub fn successors(&self, q: StateId) -> &[(Letter, Letter, StateId)] {
        &self.trans[q]
    }

    /// `[compose(t1, t2)] = {(u, w) | ∃v. (u, v) ∈ [t1] ∧ (v, w) ∈ [t2]}`,
    /// built over reachable state pairs.
    pub fn compose(&self, other: &Transducer) -> Result<Transducer> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        // other's transitions keyed by (state, input letter)
        let mut by_input: HashMap<(StateId, Letter), Vec<(Letter, StateId)>> = HashMap::new();
        for q in 0..other.num_states() {
            for &(a, b, r) in &other.trans[q] {
                by_input.entry((q, a)).or_default().push((b, r));
            }
        }

        let start = (self.initial, other.initial);
        let mut out = Transducer::new(self.alphabet.clone(), 1);
        out.accepting[0] = self.accepting[start.0] && other.accepting[start.1];
        let mut index = HashMap::from([(start, 0usize)]);
        let mut pairs = vec![start];
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let (p, q) = pairs[s];
            for &(a, b, p2) in &self.trans[p] {
                let Some(nexts) = by_input.get(&(q, b)) else {
                    continue;
                };
                for &(c, q2) in nexts {
                    let pair = (p2, q2);
                    let t = match index.get(&pair) {
                        Some(&t) => t,
                        None => {
                            let t = out.add_state(self.accepting[p2] && other.accepting[q2]);
                            index.insert(pair, t);
                            pairs.push(pair);
                            queue.push_back(t);
                            t
                        }
                    };
                    out.add_transition(s, a, c, t);
                }
            }
        }
        Ok(out)
    }

    /// Removes states that are unreachable or cannot reach acceptance.
    pub fn trim(&self) -> Transducer {
        let n = self.num_states();
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for &(_, _, r) in &self.trans[q] {
                if !reach[r] {
                    reach[r] = true;
                    stack.push(r);
                }
            }
        }
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for q in 0..n {
            for &(_, _, r) in &self.trans[q] {
                preds[r].push(q);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &preds[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }

        let mut map: Vec<Option<StateId>> = vec![None; n];
        let mut out = Transducer::new(self.alphabet.clone(), 1);
        map[self.initial] = Some(0);
        out.accepting[0] = self.accepting[self.initial];
        if !live[self.initial] {
            return out;
        }
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            let src = map[q].expect("mapped");
            for &(a, b, r) in &self.trans[q] {
                if !(reach[r] && live[r]) {
                    continue;
                }
                let dst = match map[r] {
                    Some(d) => d,
                    None => {
                        let d = out.add_state(self.accepting[r]);
                        map[r] = Some(d);
                        queue.push_back(r);
                        d
                    }
                };
                out.add_transition(src, a, b, dst);
            }
        }
        out
    }

    pub fn accepts_pair(&self, u: &[Letter], w: &[Letter]) -> bool {
        if u.len() != w.len() {
            return false;
        }
        let mut cur = vec![self.initial];
        for (&a, &b) in u.iter().zip(w) {
            let mut next: Vec<StateId> = cur
                .iter()
                .flat_map(|&q| {
                    self.trans[q]
                        .iter()
                        .filter(move |&&(x, y, _)| x == a && y == b)
                        .map(|&(_, _, r)| r)
                })
                .collect();
            next.sort_unstable();
            next.dedup();
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Projection onto one tape: `{u | ∃w. (u, w) ∈ [self]}` when `input`
    /// is set, the second tape otherwise.
    pub fn projection(&self, input: bool) -> Nfa {
        let mut nfa = Nfa::new(self.alphabet.clone(), self.num_states());
        nfa.add_initial(self.initial);
        for q in 0..self.num_states() {
            nfa.set_accepting(q, self.accepting[q]);
            for &(a, b, r) in &self.trans[q] {
                nfa.add_transition(q, if input { a } else { b }, r);
            }
        }
        nfa
    }

    /// `{w | (u, w) ∈ [self]}`.
    pub fn image(&self, u: &[Letter]) -> BTreeSet<Vec<Letter>> {
        let mut cur: BTreeSet<(StateId, Vec<Letter>)> =
            BTreeSet::from([(self.initial, Vec::new())]);
        for &a in u {
            let mut next = BTreeSet::new();
            for (q, out) in &cur {
                for &(x, y, r) in &self.trans[*q] {
                    if x == a {
                        let mut o = out.clone();
                        o.push(y);
                        next.insert((r, o));
                    }
                }
            }
            if next.is_empty() {
                return BTreeSet::new();
            }
            cur = next;
        }
        cur.into_iter()
            .filter(|(q, _)| self.accepting[*q])
            .map(|(_, w)| w)
            .collect()
    }

    /// Existential preimage `{u | ∃w. (u, w) ∈ [self] ∧ w ∈ L(d)}` as an NFA
    /// over first-tape letters.
    pub fn preimage(&self, d: &Dfa) -> Result<Nfa> {
        same_alphabet(&self.alphabet, d.alphabet())?;
        let start = (self.initial, d.initial());
        let mut nfa = Nfa::new(self.alphabet.clone(), 1);
        nfa.add_initial(0);
        nfa.set_accepting(0, self.accepting[start.0] && d.is_accepting(start.1));
        let mut index = HashMap::from([(start, 0usize)]);
        let mut pairs = vec![start];
        let mut queue = VecDeque::from([0usize]);
        while let Some(s) = queue.pop_front() {
            let (q, p) = pairs[s];
            for &(a, b, q2) in &self.trans[q] {
                let Some(p2) = d.next(p, b) else {
                    continue;
                };
                let pair = (q2, p2);
                let t = match index.get(&pair) {
                    Some(&t) => t,
                    None => {
                        let t = nfa.add_state(self.accepting[q2] && d.is_accepting(p2));
                        index.insert(pair, t);
                        pairs.push(pair);
                        queue.push_back(t);
                        t
                    }
                };
                nfa.add_transition(s, a, t);
            }
        }
        Ok(nfa)
    }
}
