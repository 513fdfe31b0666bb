use std::collections::{HashMap, VecDeque};

use super::{same_alphabet, Dfa, Letter, Nfa, StateId};
use crate::error::{Error, Result};

/// Default cap on the number of subset states in one determinization.
pub const DEFAULT_MAX_STATES: usize = 1_000_000;

/// Subset construction; only reachable, nonempty subsets are materialized.
pub fn determinize(nfa: &Nfa, max_states: usize) -> Result<Dfa> {
    let mut dfa = Dfa::new(nfa.alphabet().clone());
    let mut table: HashMap<Vec<StateId>, StateId> = HashMap::new();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();

    let init = nfa.initial().to_vec();
    dfa.set_accepting(0, init.iter().any(|&q| nfa.is_accepting(q)));
    table.insert(init.clone(), 0);
    subsets.push(init);

    let mut queue = VecDeque::from([0usize]);
    let mut moves: Vec<(Letter, StateId)> = Vec::new();
    while let Some(d) = queue.pop_front() {
        moves.clear();
        for &q in &subsets[d] {
            moves.extend_from_slice(nfa.successors(q));
        }
        moves.sort_unstable();
        moves.dedup();
        let mut i = 0;
        while i < moves.len() {
            let l = moves[i].0;
            let mut target = Vec::new();
            while i < moves.len() && moves[i].0 == l {
                target.push(moves[i].1);
                i += 1;
            }
            let next = match table.get(&target) {
                Some(&s) => s,
                None => {
                    if subsets.len() >= max_states {
                        return Err(Error::BudgetExceeded {
                            what: "determinization state count".into(),
                            limit: max_states,
                            level: None,
                        });
                    }
                    let accepting = target.iter().any(|&q| nfa.is_accepting(q));
                    let s = dfa.add_state(accepting);
                    table.insert(target.clone(), s);
                    subsets.push(target);
                    queue.push_back(s);
                    s
                }
            };
            dfa.set_transition(d, l, next);
        }
    }
    Ok(dfa)
}

/// Synchronous product over pairs of optional states. A component becomes
/// `None` once it has no transition; `step` decides whether the pair
/// survives and `accept` decides acceptance.
fn product(
    a: &Dfa,
    b: &Dfa,
    step: impl Fn(bool, bool) -> bool,
    accept: impl Fn(bool, bool) -> bool,
) -> Result<Dfa> {
    same_alphabet(a.alphabet(), b.alphabet())?;
    type Pair = (Option<StateId>, Option<StateId>);
    let acc = |(p, q): Pair| {
        accept(
            p.is_some_and(|p| a.is_accepting(p)),
            q.is_some_and(|q| b.is_accepting(q)),
        )
    };

    let mut out = Dfa::new(a.alphabet().clone());
    let start: Pair = (Some(a.initial()), Some(b.initial()));
    out.set_accepting(0, acc(start));
    let mut index: HashMap<Pair, StateId> = HashMap::from([(start, 0)]);
    let mut pairs = vec![start];
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let (p, q) = pairs[s];
        for l in a.alphabet().letters() {
            let p2 = p.and_then(|p| a.next(p, l));
            let q2 = q.and_then(|q| b.next(q, l));
            if !step(p2.is_some(), q2.is_some()) {
                continue;
            }
            let pair = (p2, q2);
            let t = match index.get(&pair) {
                Some(&t) => t,
                None => {
                    let t = out.add_state(acc(pair));
                    index.insert(pair, t);
                    pairs.push(pair);
                    queue.push_back(t);
                    t
                }
            };
            out.set_transition(s, l, t);
        }
    }
    Ok(out)
}

pub fn intersect(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    product(a, b, |x, y| x && y, |x, y| x && y)
}

pub fn union(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    product(a, b, |x, y| x || y, |x, y| x || y)
}

/// `L(dom) \ L(d)`: `d` completed with a sink, acceptance flipped, then
/// intersected with `dom`.
pub fn complement_within(d: &Dfa, dom: &Dfa) -> Result<Dfa> {
    product(d, dom, |_, y| y, |x, y| !x && y)
}
