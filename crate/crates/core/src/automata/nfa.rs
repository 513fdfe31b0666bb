use std::sync::Arc;

use super::{Alphabet, Letter, StateId};

/// Nondeterministic automaton with a set of initial states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Arc<Alphabet>,
    initial: Vec<StateId>,
    accepting: Vec<bool>,
    /// Per state, sorted and deduplicated `(letter, target)` pairs.
    trans: Vec<Vec<(Letter, StateId)>>,
}

impl Nfa {
    pub fn new(alphabet: Arc<Alphabet>, states: usize) -> Self {
        Nfa {
            alphabet,
            initial: Vec::new(),
            accepting: vec![false; states],
            trans: vec![Vec::new(); states],
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn add_initial(&mut self, q: StateId) {
        if let Err(pos) = self.initial.binary_search(&q) {
            self.initial.insert(pos, q);
        }
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn add_transition(&mut self, from: StateId, l: Letter, to: StateId) {
        let t = &mut self.trans[from];
        if let Err(pos) = t.binary_search(&(l, to)) {
            t.insert(pos, (l, to));
        }
    }

    pub fn successors(&self, q: StateId) -> &[(Letter, StateId)] {
        &self.trans[q]
    }

    /// Set of states reached from `states` by `l`, sorted.
    pub fn step(&self, states: &[StateId], l: Letter) -> Vec<StateId> {
        let mut out: Vec<StateId> = states
            .iter()
            .flat_map(|&q| {
                let t = &self.trans[q];
                let start = t.partition_point(|&(m, _)| m < l);
                t[start..]
                    .iter()
                    .take_while(move |&&(m, _)| m == l)
                    .map(|&(_, to)| to)
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn accepts(&self, word: &[Letter]) -> bool {
        let mut cur = self.initial.clone();
        for &l in word {
            cur = self.step(&cur, l);
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&q| self.accepting[q])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_by_simulation() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        // words containing an `a`
        let mut n = Nfa::new(al, 2);
        n.add_initial(0);
        n.set_accepting(1, true);
        n.add_transition(0, Letter(0), 0);
        n.add_transition(0, Letter(1), 0);
        n.add_transition(0, Letter(0), 1);
        n.add_transition(1, Letter(0), 1);
        n.add_transition(1, Letter(1), 1);
        assert!(n.accepts(&[Letter(1), Letter(0), Letter(1)]));
        assert!(!n.accepts(&[Letter(1), Letter(1)]));
        assert!(!n.accepts(&[]));
        assert_eq!(n.step(&[0, 1], Letter(0)), vec![0, 1]);
    }
}
