//! Graphviz export. Nodes and edges are emitted in state and letter order so
//! the output is stable across runs.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Alphabet, Dfa, Nfa, StateId, Transducer};

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(
    name: &str,
    states: usize,
    initial: &[StateId],
    accepting: impl Fn(StateId) -> bool,
    edges: BTreeMap<(StateId, StateId), Vec<String>>,
) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for (k, q) in initial.iter().enumerate() {
        writeln!(out, "  __start{k} [shape=point];").unwrap();
        writeln!(out, "  __start{k} -> q{q};").unwrap();
    }
    for q in 0..states {
        let shape = if accepting(q) {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(out, "  q{q} [shape={shape}];").unwrap();
    }
    for ((from, to), labels) in edges {
        writeln!(
            out,
            "  q{from} -> q{to} [label=\"{}\"];",
            escape(&labels.join(", "))
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn sym(al: &Alphabet, l: super::Letter) -> &str {
    al.symbol(l)
}

impl Dfa {
    pub fn to_dot(&self, name: &str) -> String {
        let mut edges: BTreeMap<(StateId, StateId), Vec<String>> = BTreeMap::new();
        for (q, l, t) in self.transitions() {
            edges
                .entry((q, t))
                .or_default()
                .push(sym(self.alphabet(), l).to_string());
        }
        render(
            name,
            self.num_states(),
            &[self.initial()],
            |q| self.is_accepting(q),
            edges,
        )
    }
}

impl Nfa {
    pub fn to_dot(&self, name: &str) -> String {
        let mut edges: BTreeMap<(StateId, StateId), Vec<String>> = BTreeMap::new();
        for q in 0..self.num_states() {
            for &(l, t) in self.successors(q) {
                edges
                    .entry((q, t))
                    .or_default()
                    .push(sym(self.alphabet(), l).to_string());
            }
        }
        render(
            name,
            self.num_states(),
            self.initial(),
            |q| self.is_accepting(q),
            edges,
        )
    }
}

impl Transducer {
    pub fn to_dot(&self, name: &str) -> String {
        let mut edges: BTreeMap<(StateId, StateId), Vec<String>> = BTreeMap::new();
        let al = self.alphabet();
        for q in 0..self.num_states() {
            for &(a, b, t) in self.successors(q) {
                edges
                    .entry((q, t))
                    .or_default()
                    .push(format!("{}/{}", sym(al, a), sym(al, b)));
            }
        }
        render(
            name,
            self.num_states(),
            &[self.initial()],
            |q| self.is_accepting(q),
            edges,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Alphabet, Letter};
    use super::*;

    #[test]
    fn dfa_dot_is_stable() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let mut d = Dfa::new(al);
        let s = d.add_state(true);
        d.set_transition(0, Letter(1), s);
        d.set_transition(0, Letter(0), s);
        let dot = d.to_dot("x");
        assert_eq!(
            dot,
            "digraph \"x\" {\n  rankdir=LR;\n  node [shape=circle];\n  __start0 [shape=point];\n  __start0 -> q0;\n  q0 [shape=circle];\n  q1 [shape=doublecircle];\n  q0 -> q1 [label=\"a, b\"];\n}\n"
        );
        assert_eq!(dot, d.clone().to_dot("x"));
    }
}
