//! Finite automata and letter-synchronous transducers over an interned
//! alphabet.
//!
//! Transition functions are partial everywhere. A sink state is only
//! introduced locally, where an operation needs a complete automaton.

mod dfa;
mod dot;
mod minimize;
mod nfa;
mod ops;
mod transducer;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use dfa::{Dfa, EmptinessStats};
pub use nfa::Nfa;
pub use ops::{complement_within, determinize, intersect, union, DEFAULT_MAX_STATES};
pub use transducer::Transducer;

pub type StateId = usize;

/// An interned letter. Letter order is declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(pub u32);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Symbol table mapping letters to names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Letter>,
}

impl Alphabet {
    pub fn new<I>(symbols: I) -> crate::Result<Arc<Self>>
    where
        I: IntoIterator,
        I::Item: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), Letter(i as u32)).is_some() {
                return Err(crate::Error::Duplicate(s.clone()));
            }
        }
        Ok(Arc::new(Alphabet { symbols, index }))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.symbols.len() as u32).map(Letter)
    }

    pub fn letter(&self, symbol: &str) -> Option<Letter> {
        self.index.get(symbol).copied()
    }

    pub fn symbol(&self, l: Letter) -> &str {
        &self.symbols[l.index()]
    }

    /// Parses a whitespace-separated word.
    pub fn word(&self, text: &str) -> Option<Vec<Letter>> {
        text.split_whitespace().map(|s| self.letter(s)).collect()
    }

    pub fn render(&self, word: &[Letter]) -> String {
        Word(self, word).to_string()
    }
}

struct Word<'a>(&'a Alphabet, &'a [Letter]);

impl fmt::Display for Word<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.1.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", self.0.symbol(*l))?;
        }
        Ok(())
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> crate::Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(crate::Error::AlphabetMismatch)
    }
}

/// All words of length at most `max_len`, in (length, letter order) order.
pub fn all_words(alphabet: &Alphabet, max_len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in alphabet.letters() {
                let mut w2: Vec<Letter> = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
