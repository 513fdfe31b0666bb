use std::collections::{BTreeMap, VecDeque};

use super::{Dfa, Letter, StateId};

impl Dfa {
    /// Hopcroft partition refinement on the trimmed, completed automaton.
    ///
    /// The result is partial again (the dead class is dropped) and numbered
    /// in breadth-first letter order, so equal languages yield identical
    /// automata.
    pub fn minimize(&self) -> Dfa {
        let trimmed = self.trim();
        if !trimmed.is_accepting_anywhere() {
            return Dfa::new(self.alphabet().clone());
        }
        let c = trimmed.completed();
        let n = c.num_states();
        let k = c.alphabet().len();
        let sink = (n > trimmed.num_states()).then_some(n - 1);

        let mut inverse: Vec<Vec<Vec<StateId>>> = vec![vec![Vec::new(); n]; k];
        for (q, l, t) in c.transitions() {
            inverse[l.index()][t].push(q);
        }

        let mut block_of = vec![0usize; n];
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        let (acc, rej): (Vec<StateId>, Vec<StateId>) = (0..n).partition(|&q| c.is_accepting(q));
        for part in [acc, rej] {
            if !part.is_empty() {
                for &q in &part {
                    block_of[q] = blocks.len();
                }
                blocks.push(part);
            }
        }

        let mut work: Vec<(usize, usize)> = Vec::new();
        let mut in_work: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
        let smallest = (0..blocks.len())
            .min_by_key(|&b| blocks[b].len())
            .unwrap_or(0);
        if blocks.len() == 2 {
            work.extend((0..k).map(|l| (smallest, l)));
            in_work[smallest].fill(true);
        }

        let mut marked = vec![false; n];
        while let Some((b, l)) = work.pop() {
            in_work[b][l] = false;
            let mut touched: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
            for &s in &blocks[b] {
                for &q in &inverse[l][s] {
                    touched.entry(block_of[q]).or_default().push(q);
                }
            }
            for (y, xs) in touched {
                if xs.len() == blocks[y].len() {
                    continue;
                }
                for &q in &xs {
                    marked[q] = true;
                }
                let (inside, outside): (Vec<StateId>, Vec<StateId>) =
                    blocks[y].iter().partition(|&&q| marked[q]);
                for &q in &xs {
                    marked[q] = false;
                }
                let z = blocks.len();
                for &q in &outside {
                    block_of[q] = z;
                }
                let smaller = if inside.len() <= outside.len() { y } else { z };
                blocks[y] = inside;
                blocks.push(outside);
                in_work.push(vec![false; k]);
                #[allow(clippy::needless_range_loop)]
                for c in 0..k {
                    if in_work[y][c] {
                        work.push((z, c));
                        in_work[z][c] = true;
                    } else {
                        work.push((smaller, c));
                        in_work[smaller][c] = true;
                    }
                }
            }
        }

        let dead = sink.map(|s| block_of[s]);
        let mut out = Dfa::new(self.alphabet().clone());
        let mut map: Vec<Option<StateId>> = vec![None; blocks.len()];
        let root = block_of[c.initial()];
        map[root] = Some(0);
        out.set_accepting(0, c.is_accepting(c.initial()));
        let mut queue = VecDeque::from([root]);
        while let Some(b) = queue.pop_front() {
            let rep = blocks[b][0];
            let src = map[b].expect("mapped before enqueue");
            for l in 0..k {
                let letter = Letter(l as u32);
                let t = block_of[c.next(rep, letter).expect("complete")];
                if Some(t) == dead {
                    continue;
                }
                let dst = match map[t] {
                    Some(d) => d,
                    None => {
                        let d = out.add_state(c.is_accepting(blocks[t][0]));
                        map[t] = Some(d);
                        queue.push_back(t);
                        d
                    }
                };
                out.set_transition(src, letter, dst);
            }
        }
        out
    }

    fn is_accepting_anywhere(&self) -> bool {
        (0..self.num_states()).any(|q| self.is_accepting(q))
    }
}
