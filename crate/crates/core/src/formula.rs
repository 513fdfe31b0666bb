//! Epistemic formulas and temporal goal formulas.
//!
//! Concrete syntax, loosest binding first:
//!
//! ```text
//! form ::= form "->" form          (right associative)
//!        | form "|" form           (left associative)
//!        | form "&" form           (left associative)
//!        | "~" form | "K[" ident "]" form
//!        | "true" | "false" | ident | "(" form ")"
//! goal ::= ("AG" | "AF" | "EF" | "EG" | "NOW") form
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The agents and atomic propositions an instance is built over.
///
/// Declaration order is significant: it fixes the index of every agent and
/// proposition throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    agents: Vec<String>,
    props: Vec<String>,
}

impl Signature {
    pub fn new<A, P>(agents: A, props: P) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let agents: Vec<String> = agents.into_iter().map(Into::into).collect();
        let props: Vec<String> = props.into_iter().map(Into::into).collect();
        check_unique(&agents)?;
        check_unique(&props)?;
        Ok(Signature { agents, props })
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn agent_index(&self, agent: &str) -> Result<usize> {
        self.agents
            .iter()
            .position(|a| a == agent)
            .ok_or_else(|| Error::UnknownAgent(agent.to_string()))
    }

    pub fn prop_index(&self, prop: &str) -> Result<usize> {
        self.props
            .iter()
            .position(|p| p == prop)
            .ok_or_else(|| Error::UnknownProposition(prop.to_string()))
    }
}

pub(crate) fn check_unique(names: &[String]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n.as_str()) {
            return Err(Error::Duplicate(n.clone()));
        }
    }
    Ok(())
}

/// A formula of the epistemic language.
///
/// `And` and `Implies` are kept in the tree as written; [`Formula::normalize`]
/// rewrites them into `Not`/`Or`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Know(String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: impl Into<String>) -> Self {
        Formula::Atom(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn know(agent: impl Into<String>, f: Formula) -> Self {
        Formula::Know(agent.into(), Box::new(f))
    }

    /// Maximum number of knowledge operators on a root-to-leaf path.
    pub fn nesting_depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) => f.nesting_depth(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.nesting_depth().max(b.nesting_depth())
            }
            Formula::Know(_, f) => 1 + f.nesting_depth(),
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_propositional(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::Know(..) => false,
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Know(_, f) => 1 + f.size(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Rewrites `And` and `Implies` into `Not`/`Or`.
    pub fn normalize(&self) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(p) => Formula::Atom(p.clone()),
            Formula::Not(f) => Formula::not(f.normalize()),
            Formula::Or(a, b) => Formula::or(a.normalize(), b.normalize()),
            Formula::And(a, b) => Formula::not(Formula::or(
                Formula::not(a.normalize()),
                Formula::not(b.normalize()),
            )),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.normalize()), b.normalize()),
            Formula::Know(i, f) => Formula::know(i.clone(), f.normalize()),
        }
    }

    /// Checks that every atom and agent is declared in `sig`.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(p) => sig.prop_index(p).map(|_| ()),
            Formula::Not(f) => f.validate(sig),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) => {
                a.validate(sig)?;
                b.validate(sig)
            }
            Formula::Know(i, f) => {
                sig.agent_index(i)?;
                f.validate(sig)
            }
        }
    }

    /// Evaluates a propositional formula under the valuation given by `holds`.
    ///
    /// Returns `None` when the formula contains a knowledge operator.
    pub fn eval_with<F: Fn(&str) -> bool>(&self, holds: &F) -> Option<bool> {
        Some(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(p) => holds(p),
            Formula::Not(f) => !f.eval_with(holds)?,
            Formula::Or(a, b) => a.eval_with(holds)? | b.eval_with(holds)?,
            Formula::And(a, b) => a.eval_with(holds)? & b.eval_with(holds)?,
            Formula::Implies(a, b) => !a.eval_with(holds)? | b.eval_with(holds)?,
            Formula::Know(..) => return None,
        })
    }

    /// Standard propositional truth under the set of true propositions.
    pub fn eval_propositional<S: AsRef<str> + Ord>(&self, valuation: &BTreeSet<S>) -> Result<bool> {
        self.eval_with(&|p: &str| valuation.iter().any(|q| q.as_ref() == p))
            .ok_or_else(|| Error::NonPropositional {
                what: "formula".into(),
                formula: self.to_string(),
            })
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) | Formula::Know(..) => 4,
            Formula::True | Formula::False | Formula::Atom(_) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        if prec < min {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(p) => write!(f, "{p}")?,
            Formula::Not(g) => {
                write!(f, "~")?;
                g.fmt_prec(f, 4)?;
            }
            Formula::Know(i, g) => {
                write!(f, "K[{i}] ")?;
                g.fmt_prec(f, 4)?;
            }
            Formula::Or(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            Formula::And(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            Formula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if prec < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl FromStr for Formula {
    type Err = Error;

    /// Parses without checking atoms and agents against a signature.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s)?;
        let f = p.implication()?;
        p.expect_end()?;
        Ok(f)
    }
}

/// Parses `text` and checks it against the declared agents and propositions.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula> {
    let f: Formula = text.parse()?;
    f.validate(sig)?;
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Know(String),
    True,
    False,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position: usize, message: String| Error::Syntax { position, message };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '~' => {
                out.push((pos, Token::Tilde));
                i += 1;
            }
            '&' => {
                out.push((pos, Token::Amp));
                i += 1;
            }
            '|' => {
                out.push((pos, Token::Pipe));
                i += 1;
            }
            '(' => {
                out.push((pos, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Token::RParen));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1).map(|&(_, c)| c) == Some('>') {
                    out.push((pos, Token::Arrow));
                    i += 2;
                } else {
                    return Err(err(pos, "expected `->`".into()));
                }
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|&(_, c)| c).collect();
                if word == "K" && chars.get(i).map(|&(_, c)| c) == Some('[') {
                    i += 1;
                    while i < chars.len() && chars[i].1.is_whitespace() {
                        i += 1;
                    }
                    let astart = i;
                    while i < chars.len() && is_ident_char(chars[i].1) {
                        i += 1;
                    }
                    if astart == i || !is_ident_start(chars[astart].1) {
                        let p = chars.get(astart).map_or(text.len(), |&(p, _)| p);
                        return Err(err(p, "expected agent name after `K[`".into()));
                    }
                    let agent: String = chars[astart..i].iter().map(|&(_, c)| c).collect();
                    while i < chars.len() && chars[i].1.is_whitespace() {
                        i += 1;
                    }
                    if chars.get(i).map(|&(_, c)| c) != Some(']') {
                        let p = chars.get(i).map_or(text.len(), |&(p, _)| p);
                        return Err(err(p, "expected `]`".into()));
                    }
                    i += 1;
                    out.push((pos, Token::Know(agent)));
                } else {
                    let tok = match word.as_str() {
                        "true" => Token::True,
                        "false" => Token::False,
                        _ => Token::Ident(word),
                    };
                    out.push((pos, tok));
                }
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Parser {
            tokens: tokenize(text)?,
            pos: 0,
            len: text.len(),
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |&(p, _)| p)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected token {t:?}"))),
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Token::Arrow) {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Token::Pipe) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Token::Tilde) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Token::Know(agent)) => {
                self.pos += 1;
                Ok(Formula::know(agent, self.unary()?))
            }
            Some(Token::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Token::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Token::Ident(p)) => {
                self.pos += 1;
                Ok(Formula::Atom(p))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let f = self.implication()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(f)
            }
            Some(t) => Err(self.error(format!("unexpected token {t:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Temporal head of a goal formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GoalHead {
    Now,
    AlwaysGlobally,
    AlwaysFinally,
    ExistsFinally,
    ExistsGlobally,
}

impl GoalHead {
    pub fn keyword(self) -> &'static str {
        match self {
            GoalHead::Now => "NOW",
            GoalHead::AlwaysGlobally => "AG",
            GoalHead::AlwaysFinally => "AF",
            GoalHead::ExistsFinally => "EF",
            GoalHead::ExistsGlobally => "EG",
        }
    }
}

/// A temporal head applied to an epistemic state formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GoalFormula {
    pub head: GoalHead,
    pub body: Formula,
}

impl GoalFormula {
    pub fn new(head: GoalHead, body: Formula) -> Self {
        GoalFormula { head, body }
    }
}

impl fmt::Display for GoalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.head.keyword())?;
        self.body.fmt_prec(f, 4)
    }
}

impl FromStr for GoalFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim_start();
        let offset = s.len() - trimmed.len();
        let heads = [
            GoalHead::Now,
            GoalHead::AlwaysGlobally,
            GoalHead::AlwaysFinally,
            GoalHead::ExistsFinally,
            GoalHead::ExistsGlobally,
        ];
        for head in heads {
            let kw = head.keyword();
            if let Some(rest) = trimmed.strip_prefix(kw) {
                if rest.chars().next().is_some_and(is_ident_char) {
                    continue;
                }
                let body: Formula = rest.parse().map_err(|e| match e {
                    Error::Syntax { position, message } => Error::Syntax {
                        position: position + offset + kw.len(),
                        message,
                    },
                    other => other,
                })?;
                return Ok(GoalFormula { head, body });
            }
        }
        Err(Error::Syntax {
            position: offset,
            message: "expected one of AG, AF, EF, EG, NOW".into(),
        })
    }
}

/// Parses a goal and checks its body against the signature.
pub fn parse_goal(text: &str, sig: &Signature) -> Result<GoalFormula> {
    let g: GoalFormula = text.parse()?;
    g.body.validate(sig)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"]).unwrap()
    }

    fn f(s: &str) -> Formula {
        parse_formula(s, &sig()).unwrap()
    }

    #[test]
    fn parses_grammar_images() {
        assert_eq!(f("p"), Formula::atom("p"));
        assert_eq!(
            f("K[a](p | ~q)"),
            Formula::know(
                "a",
                Formula::or(Formula::atom("p"), Formula::not(Formula::atom("q")))
            )
        );
        assert_eq!(
            f("K[a](K[b] p)"),
            Formula::know("a", Formula::know("b", Formula::atom("p")))
        );
        assert_eq!(f("K[a](K[b] p)").nesting_depth(), 2);
    }

    #[test]
    fn precedence_and_associativity() {
        // ~ > & > | > ->, -> to the right
        assert_eq!(
            f("~p & q | p -> q -> p"),
            Formula::implies(
                Formula::or(
                    Formula::and(Formula::not(Formula::atom("p")), Formula::atom("q")),
                    Formula::atom("p")
                ),
                Formula::implies(Formula::atom("q"), Formula::atom("p"))
            )
        );
        assert_eq!(
            f("p | q | p"),
            Formula::or(
                Formula::or(Formula::atom("p"), Formula::atom("q")),
                Formula::atom("p")
            )
        );
        assert_eq!(
            f("K[a] p & q"),
            Formula::and(Formula::know("a", Formula::atom("p")), Formula::atom("q"))
        );
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(
            parse_formula("r", &sig()),
            Err(Error::UnknownProposition(p)) if p == "r"
        ));
        assert!(matches!(
            parse_formula("K[c] p", &sig()),
            Err(Error::UnknownAgent(a)) if a == "c"
        ));
        assert!(matches!(
            parse_formula("p & ", &sig()),
            Err(Error::Syntax { position: 4, .. })
        ));
        assert!(matches!(
            parse_formula("p $ q", &sig()),
            Err(Error::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse_formula("(p", &sig()),
            Err(Error::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            parse_formula("p - q", &sig()),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn atom_named_k_is_allowed() {
        let s = Signature::new(["a"], ["K"]).unwrap();
        assert_eq!(parse_formula("K & K[a] K", &s).unwrap().nesting_depth(), 1);
    }

    #[test]
    fn depth_and_propositionality() {
        assert_eq!(f("p | ~p").nesting_depth(), 0);
        assert_eq!(f("K[a] p").nesting_depth(), 1);
        assert_eq!(f("K[a](p & K[b] K[a] q)").nesting_depth(), 3);
        assert!(f("p -> q").is_propositional());
        assert!(!f("K[a] p").is_propositional());
        assert!(!f("~(p | K[b] q)").is_propositional());
    }

    #[test]
    fn propositional_evaluation() {
        let v: BTreeSet<&str> = ["p"].into_iter().collect();
        assert!(f("p").eval_propositional(&v).unwrap());
        assert!(f("p & ~q").eval_propositional(&v).unwrap());
        assert!(!f("p -> q").eval_propositional(&v).unwrap());
        assert!(f("true").eval_propositional(&v).unwrap());
        assert!(matches!(
            f("K[a] p").eval_propositional(&v),
            Err(Error::NonPropositional { .. })
        ));
    }

    #[test]
    fn sizes_count_nodes() {
        assert_eq!(f("true").size(), 1);
        assert_eq!(f("K[a](p | ~q)").size(), 5);
    }

    #[test]
    fn goals() {
        let g = parse_goal("EF K[a] p", &sig()).unwrap();
        assert_eq!(g.head, GoalHead::ExistsFinally);
        assert_eq!(g.body, f("K[a] p"));
        assert_eq!(
            parse_goal("AG(p|q)", &sig()).unwrap().head,
            GoalHead::AlwaysGlobally
        );
        assert_eq!(parse_goal("NOW p", &sig()).unwrap().head, GoalHead::Now);
        assert!(parse_goal("AGp", &sig()).is_err());
        assert!(parse_goal("p", &sig()).is_err());
        let g = parse_goal("AF (p -> q)", &sig()).unwrap();
        assert_eq!(g.to_string().parse::<GoalFormula>().unwrap(), g);
    }
}
