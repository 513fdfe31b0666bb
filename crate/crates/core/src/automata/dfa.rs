use std::collections::VecDeque;
use std::sync::Arc;

use super::{same_alphabet, Alphabet, Letter, Nfa, StateId};
use crate::error::Result;

const NONE: u32 = u32::MAX;

/// Deterministic automaton with a partial transition function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    delta: Vec<u32>,
    accepting: Vec<bool>,
    initial: u32,
}

/// Work done by one emptiness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EmptinessStats {
    pub states_visited: usize,
    pub transitions_inspected: usize,
}

impl Dfa {
    /// A single non-accepting initial state: the empty language.
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        let k = alphabet.len();
        Dfa {
            alphabet,
            delta: vec![NONE; k],
            accepting: vec![false],
            initial: 0,
        }
    }

    /// Accepts every word over the alphabet.
    pub fn universal(alphabet: Arc<Alphabet>) -> Self {
        let mut d = Dfa::new(alphabet);
        d.accepting[0] = true;
        for l in 0..d.alphabet.len() as u32 {
            d.set_transition(0, Letter(l), 0);
        }
        d
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|&&t| t != NONE).count()
    }

    pub fn initial(&self) -> StateId {
        self.initial as StateId
    }

    pub fn set_initial(&mut self, q: StateId) {
        assert!(q < self.num_states());
        self.initial = q as u32;
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.delta
            .extend(std::iter::repeat_n(NONE, self.alphabet.len()));
        self.accepting.len() - 1
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn next(&self, q: StateId, l: Letter) -> Option<StateId> {
        let t = self.delta[q * self.alphabet.len() + l.index()];
        (t != NONE).then_some(t as StateId)
    }

    pub fn set_transition(&mut self, q: StateId, l: Letter, to: StateId) {
        assert!(to < self.num_states());
        let k = self.alphabet.len();
        self.delta[q * k + l.index()] = to as u32;
    }

    pub fn remove_transition(&mut self, q: StateId, l: Letter) {
        let k = self.alphabet.len();
        self.delta[q * k + l.index()] = NONE;
    }

    /// Outgoing transitions of `q` in letter order.
    pub fn successors(&self, q: StateId) -> impl Iterator<Item = (Letter, StateId)> + '_ {
        let k = self.alphabet.len();
        self.delta[q * k..(q + 1) * k]
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != NONE)
            .map(|(l, &t)| (Letter(l as u32), t as StateId))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Letter, StateId)> + '_ {
        (0..self.num_states()).flat_map(move |q| self.successors(q).map(move |(l, t)| (q, l, t)))
    }

    /// State reached after reading `word` from `from`.
    pub fn run_from(&self, from: StateId, word: &[Letter]) -> Option<StateId> {
        word.iter().try_fold(from, |q, &l| self.next(q, l))
    }

    pub fn run(&self, word: &[Letter]) -> Option<StateId> {
        self.run_from(self.initial(), word)
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        self.run(word).is_some_and(|q| self.accepting[q])
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial()];
        seen[self.initial()] = true;
        while let Some(q) = stack.pop() {
            for (_, t) in self.successors(q) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }

    /// States from which some accepting state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for (q, _, t) in self.transitions() {
            preds[t].push(q);
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
        live
    }

    /// Keeps the states that are both reachable and co-accessible,
    /// renumbered in breadth-first order.
    pub fn trim(&self) -> Dfa {
        let reach = self.reachable();
        let live = self.coaccessible();
        let keep: Vec<bool> = reach.iter().zip(&live).map(|(a, b)| *a && *b).collect();
        self.restrict_bfs(self.initial(), &keep)
    }

    /// Copy of the part of `self` reachable from `root` through `keep`
    /// states, renumbered in breadth-first letter order. `root` is always kept.
    pub(crate) fn restrict_bfs(&self, root: StateId, keep: &[bool]) -> Dfa {
        let mut out = Dfa::new(self.alphabet.clone());
        let mut map = vec![NONE; self.num_states()];
        map[root] = 0;
        out.accepting[0] = self.accepting[root] && keep[root];
        let mut queue = VecDeque::from([root]);
        if !keep[root] {
            return out;
        }
        while let Some(q) = queue.pop_front() {
            let src = map[q] as StateId;
            for (l, t) in self.successors(q) {
                if !keep[t] {
                    continue;
                }
                if map[t] == NONE {
                    map[t] = out.add_state(self.accepting[t]) as u32;
                    queue.push_back(t);
                }
                out.set_transition(src, l, map[t] as StateId);
            }
        }
        out
    }

    /// The automaton started from `q` instead of the initial state.
    pub fn rerooted(&self, q: StateId) -> Dfa {
        let keep = vec![true; self.num_states()];
        self.restrict_bfs(q, &keep)
    }

    /// Drops every transition whose letter fails `allowed`.
    pub fn retain_letters(&self, allowed: impl Fn(Letter) -> bool) -> Dfa {
        let mut out = self.clone();
        for q in 0..out.num_states() {
            for l in self.alphabet.letters() {
                if !allowed(l) {
                    out.remove_transition(q, l);
                }
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.emptiness_with_stats().0
    }

    /// Emptiness by graph search; each reachable state and transition is
    /// inspected at most once.
    pub fn emptiness_with_stats(&self) -> (bool, EmptinessStats) {
        let mut stats = EmptinessStats::default();
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.initial()];
        seen[self.initial()] = true;
        while let Some(q) = stack.pop() {
            stats.states_visited += 1;
            if self.accepting[q] {
                return (false, stats);
            }
            for (_, t) in self.successors(q) {
                stats.transitions_inspected += 1;
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        (true, stats)
    }

    /// Shortest accepted word, ties broken by letter order.
    pub fn shortest_accepted(&self) -> Option<Vec<Letter>> {
        let n = self.num_states();
        let mut parent: Vec<Option<(StateId, Letter)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([self.initial()]);
        seen[self.initial()] = true;
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, l)) = parent[cur] {
                    word.push(l);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for (l, t) in self.successors(q) {
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, l));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Accepted words sorted by (length, letter order), up to the bounds.
    /// The flag is set when `max_count` cut the enumeration short.
    pub fn enumerate(&self, max_len: usize, max_count: usize) -> (Vec<Vec<Letter>>, bool) {
        let trimmed = self.trim();
        let mut out = Vec::new();
        let mut frontier: Vec<(StateId, Vec<Letter>)> = vec![(trimmed.initial(), Vec::new())];
        for len in 0..=max_len {
            for (q, w) in &frontier {
                if trimmed.accepting[*q] {
                    if out.len() == max_count {
                        return (out, true);
                    }
                    out.push(w.clone());
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (q, w) in &frontier {
                for (l, t) in trimmed.successors(*q) {
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push((t, w2));
                }
            }
            frontier = next;
        }
        (out, false)
    }

    /// All accepted words of exactly `len` letters, in letter order.
    pub fn words_of_length(&self, len: usize) -> Vec<Vec<Letter>> {
        let mut frontier: Vec<(StateId, Vec<Letter>)> = vec![(self.initial(), Vec::new())];
        for _ in 0..len {
            let mut next = Vec::new();
            for (q, w) in &frontier {
                for (l, t) in self.successors(*q) {
                    let mut w2 = w.clone();
                    w2.push(l);
                    next.push((t, w2));
                }
            }
            frontier = next;
        }
        frontier
            .into_iter()
            .filter(|(q, _)| self.accepting[*q])
            .map(|(_, w)| w)
            .collect()
    }

    pub fn to_nfa(&self) -> Nfa {
        let mut n = Nfa::new(self.alphabet.clone(), self.num_states());
        n.add_initial(self.initial());
        for q in 0..self.num_states() {
            n.set_accepting(q, self.accepting[q]);
        }
        for (q, l, t) in self.transitions() {
            n.add_transition(q, l, t);
        }
        n
    }

    /// Complete copy; the sink (if one was needed) is the last state.
    pub(crate) fn completed(&self) -> Dfa {
        if self.delta.iter().all(|&t| t != NONE) {
            return self.clone();
        }
        let mut out = self.clone();
        let sink = out.add_state(false) as u32;
        for t in out.delta.iter_mut() {
            if *t == NONE {
                *t = sink;
            }
        }
        out
    }

    /// Language equality via a product search for a distinguishing word.
    pub fn language_eq(&self, other: &Dfa) -> Result<bool> {
        same_alphabet(&self.alphabet, &other.alphabet)?;
        Ok(self.distinguishing_word(other).is_none())
    }

    /// Shortest word accepted by exactly one of the two automata.
    pub fn distinguishing_word(&self, other: &Dfa) -> Option<Vec<Letter>> {
        let a = self.completed();
        let b = other.completed();
        let nb = b.num_states();
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None; a.num_states() * nb];
        let mut seen = vec![false; a.num_states() * nb];
        let start = a.initial() * nb + b.initial();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(s) = queue.pop_front() {
            let (p, q) = (s / nb, s % nb);
            if a.accepting[p] != b.accepting[q] {
                let mut word = Vec::new();
                let mut cur = s;
                while let Some((prev, l)) = parent[cur] {
                    word.push(l);
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            for l in a.alphabet.letters() {
                let (p2, q2) = (a.next(p, l).unwrap(), b.next(q, l).unwrap());
                let t = p2 * nb + q2;
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((s, l));
                    queue.push_back(t);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Alphabet::new(["a", "b"]).unwrap()
    }

    /// {aa, b}
    fn aa_or_b() -> Dfa {
        let al = ab();
        let mut d = Dfa::new(al.clone());
        let s1 = d.add_state(false);
        let s2 = d.add_state(true);
        let s3 = d.add_state(true);
        d.set_transition(0, Letter(0), s1);
        d.set_transition(s1, Letter(0), s2);
        d.set_transition(0, Letter(1), s3);
        d
    }

    #[test]
    fn shortest_prefers_length_then_letter_order() {
        let d = aa_or_b();
        assert_eq!(d.shortest_accepted(), Some(vec![Letter(1)]));
        assert_eq!(Dfa::new(ab()).shortest_accepted(), None);
    }

    #[test]
    fn unreachable_accepting_state_is_empty() {
        let mut d = Dfa::new(ab());
        d.add_state(true);
        assert!(d.is_empty());
        assert_eq!(d.trim().num_states(), 1);
    }

    #[test]
    fn enumeration_order_and_truncation() {
        let d = aa_or_b();
        let (words, truncated) = d.enumerate(5, 10);
        assert_eq!(words, vec![vec![Letter(1)], vec![Letter(0), Letter(0)]]);
        assert!(!truncated);
        let (words, truncated) = Dfa::universal(ab()).enumerate(2, 3);
        assert_eq!(words, vec![vec![], vec![Letter(0)], vec![Letter(1)]]);
        assert!(truncated);
    }

    #[test]
    fn rerooting_and_letter_filtering() {
        let d = aa_or_b();
        let r = d.rerooted(1);
        assert!(r.accepts(&[Letter(0)]));
        assert!(!r.accepts(&[]));
        let only_a = d.retain_letters(|l| l == Letter(0));
        assert!(!only_a.accepts(&[Letter(1)]));
        assert!(only_a.accepts(&[Letter(0), Letter(0)]));
    }

    #[test]
    fn distinguishing_words() {
        let d = aa_or_b();
        assert!(d.language_eq(&d.trim()).unwrap());
        assert_eq!(
            d.distinguishing_word(&Dfa::new(ab())),
            Some(vec![Letter(1)])
        );
    }
}
