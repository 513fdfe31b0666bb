use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),

    #[error("unknown agent `{0}`")]
    UnknownAgent(String),

    #[error("unknown world `{0}`")]
    UnknownWorld(String),

    #[error("unknown event `{0}`")]
    UnknownEvent(String),

    #[error("duplicate identifier `{0}`")]
    Duplicate(String),

    #[error("non-propositional {what}: {formula}")]
    NonPropositional { what: String, formula: String },

    #[error("{what} exceeded the budget of {limit}{}", level.map(|l| format!(" (at level {l})")).unwrap_or_default())]
    BudgetExceeded {
        what: String,
        limit: usize,
        level: Option<usize>,
    },

    #[error("alphabet mismatch between automata")]
    AlphabetMismatch,

    #[error("history `{0}` is not in the domain")]
    NotInDomain(String),

    #[error("malformed protocol: {0}")]
    MalformedProtocol(String),

    #[error("unsupported goal: {0}")]
    UnsupportedGoal(String),

    #[error("{path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }

    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
