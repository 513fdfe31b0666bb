//! Compiles an epistemic formula into a DFA accepting exactly the histories
//! at which it holds.
//!
//! Every knowledge operator costs one preimage through the agent's relation
//! transducer followed by a subset construction, which is where the tower of
//! exponentials in the nesting depth comes from.

use std::collections::HashMap;
use std::fmt;

use crate::automata::{self, Dfa, Letter};
use crate::del::History;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::regular::RegularRepresentation;

/// Formula over `{Not, Or, Know}` with resolved indices; the memo key.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Norm {
    Top,
    Bottom,
    Atom(usize),
    Not(Box<Norm>),
    Or(Box<Norm>, Box<Norm>),
    Know(usize, Box<Norm>),
}

impl Norm {
    fn from_formula(f: &Formula, rep: &RegularRepresentation) -> Result<Norm> {
        let sig = rep.signature();
        Ok(match f {
            Formula::True => Norm::Top,
            Formula::False => Norm::Bottom,
            Formula::Atom(p) => Norm::Atom(sig.prop_index(p)?),
            Formula::Not(g) => Norm::Not(Box::new(Norm::from_formula(g, rep)?)),
            Formula::Or(a, b) => Norm::Or(
                Box::new(Norm::from_formula(a, rep)?),
                Box::new(Norm::from_formula(b, rep)?),
            ),
            Formula::Know(i, g) => {
                Norm::Know(sig.agent_index(i)?, Box::new(Norm::from_formula(g, rep)?))
            }
            Formula::And(..) | Formula::Implies(..) => {
                return Norm::from_formula(&f.normalize(), rep)
            }
        })
    }

    fn depth(&self) -> usize {
        match self {
            Norm::Top | Norm::Bottom | Norm::Atom(_) => 0,
            Norm::Not(g) => g.depth(),
            Norm::Or(a, b) => a.depth().max(b.depth()),
            Norm::Know(_, g) => 1 + g.depth(),
        }
    }
}

/// State counts observed at one knowledge-nesting level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LevelCount {
    pub level: usize,
    /// Largest automaton built at this level before minimization.
    pub before_minimization: usize,
    /// Largest automaton kept at this level after minimization.
    pub after_minimization: usize,
}

/// Per-level state counts, tab separated when displayed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupReport {
    pub levels: Vec<LevelCount>,
}

impl fmt::Display for BlowupReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level\tbefore_min\tafter_min")?;
        for l in &self.levels {
            writeln!(
                f,
                "{}\t{}\t{}",
                l.level, l.before_minimization, l.after_minimization
            )?;
        }
        Ok(())
    }
}

/// A compilation session: memoized sat automata for one representation.
pub struct SatCompiler<'r> {
    rep: &'r RegularRepresentation,
    memo: HashMap<Norm, Dfa>,
    domain: Dfa,
    max_states: usize,
    counts: Vec<LevelCount>,
}

impl<'r> SatCompiler<'r> {
    pub fn new(rep: &'r RegularRepresentation) -> Self {
        Self::with_budget(rep, automata::DEFAULT_MAX_STATES)
    }

    /// `max_states` caps every subset construction.
    pub fn with_budget(rep: &'r RegularRepresentation, max_states: usize) -> Self {
        SatCompiler {
            rep,
            memo: HashMap::new(),
            domain: rep.domain().minimize(),
            max_states,
            counts: Vec::new(),
        }
    }

    pub fn representation(&self) -> &RegularRepresentation {
        self.rep
    }

    /// Minimal DFA for the set of domain histories satisfying `f`.
    pub fn compile(&mut self, f: &Formula) -> Result<Dfa> {
        let n = Norm::from_formula(f, self.rep)?;
        self.compile_norm(&n)
    }

    /// Memoized automata in insertion-independent order, for export.
    pub fn memo_dot_files(&self) -> Vec<(String, String)> {
        let mut items: Vec<(String, &Dfa)> =
            self.memo.iter().map(|(n, d)| (self.render(n), d)).collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        items
            .into_iter()
            .enumerate()
            .map(|(k, (name, d))| (format!("sat_{k:03}.dot"), d.to_dot(&name)))
            .collect()
    }

    fn render(&self, n: &Norm) -> String {
        let sig = self.rep.signature();
        match n {
            Norm::Top => "true".into(),
            Norm::Bottom => "false".into(),
            Norm::Atom(p) => sig.props()[*p].clone(),
            Norm::Not(g) => format!("~({})", self.render(g)),
            Norm::Or(a, b) => format!("({} | {})", self.render(a), self.render(b)),
            Norm::Know(i, g) => format!("K[{}]({})", sig.agents()[*i], self.render(g)),
        }
    }

    fn record(&mut self, level: usize, before: usize, after: usize) {
        while self.counts.len() <= level {
            let l = self.counts.len();
            self.counts.push(LevelCount {
                level: l,
                ..Default::default()
            });
        }
        let c = &mut self.counts[level];
        c.before_minimization = c.before_minimization.max(before);
        c.after_minimization = c.after_minimization.max(after);
    }

    fn compile_norm(&mut self, n: &Norm) -> Result<Dfa> {
        if let Some(d) = self.memo.get(n) {
            return Ok(d.clone());
        }
        let level = n.depth();
        let raw = match n {
            Norm::Top => self.domain.clone(),
            Norm::Bottom => Dfa::new(self.rep.alphabet().clone()),
            Norm::Atom(p) => self.rep.valuation(*p).clone(),
            Norm::Not(g) => {
                let inner = self.compile_norm(g)?;
                automata::complement_within(&inner, &self.domain)?
            }
            Norm::Or(a, b) => {
                let (a, b) = (self.compile_norm(a)?, self.compile_norm(b)?);
                automata::union(&a, &b)?
            }
            Norm::Know(i, g) => {
                // K_i g = ¬ pre_i(¬g), inside the domain
                let counter = self.compile_norm(&Norm::Not(g.clone()))?;
                let pre = self.rep.relation(*i).preimage(&counter)?;
                let det = automata::determinize(&pre, self.max_states).map_err(|e| match e {
                    Error::BudgetExceeded { what, limit, .. } => Error::BudgetExceeded {
                        what,
                        limit,
                        level: Some(level),
                    },
                    other => other,
                })?;
                self.record(level, det.num_states(), det.minimize().num_states());
                automata::complement_within(&det, &self.domain)?
            }
        };
        let d = raw.minimize();
        self.record(level, raw.num_states(), d.num_states());
        debug_assert!(
            automata::complement_within(&self.domain, &d)?.is_empty(),
            "sat automaton escapes the domain"
        );
        self.memo.insert(n.clone(), d.clone());
        Ok(d)
    }

    /// Whether `f` holds at the history `h`.
    pub fn holds_at(&mut self, f: &Formula, h: &History) -> Result<bool> {
        let word = self
            .rep
            .word_of(h)
            .map_err(|_| Error::NotInDomain(h.to_string()))?;
        self.holds_at_word(f, &word)
    }

    pub fn holds_at_word(&mut self, f: &Formula, word: &[Letter]) -> Result<bool> {
        if !self.domain.accepts(word) {
            return Err(Error::NotInDomain(self.rep.alphabet().render(word)));
        }
        Ok(self.compile(f)?.accepts(word))
    }
}

/// Minimal DFA for the histories satisfying `f`, in a fresh session.
pub fn compile(f: &Formula, rep: &RegularRepresentation) -> Result<Dfa> {
    SatCompiler::new(rep).compile(f)
}

pub fn holds_at(f: &Formula, h: &History, rep: &RegularRepresentation) -> Result<bool> {
    SatCompiler::new(rep).holds_at(f, h)
}

/// Largest automaton built at each knowledge-nesting level while compiling
/// `f`; one entry per level from 0 to the nesting depth.
pub fn blowup_report(f: &Formula, rep: &RegularRepresentation) -> Result<BlowupReport> {
    let mut c = SatCompiler::new(rep);
    c.compile(f)?;
    let mut levels = c.counts;
    levels.truncate(f.nesting_depth() + 1);
    Ok(BlowupReport { levels })
}
