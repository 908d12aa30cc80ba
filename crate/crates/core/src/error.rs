use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cap exceeded: {what} needs {requested}, cap is {cap}")]
    CapExceeded { what: String, requested: String, cap: String },
    #[error("invalid family level {0}")]
    InvalidLevel(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("too many constrained coordinates: {count} > {limit}")]
    TooManyFreeCoordinates { count: usize, limit: usize },
    #[error("point outside domain at stage {stage}")]
    OutsideDomain { stage: usize },
    #[error("empty set")]
    EmptySet,
    #[error("vertices are not connected")]
    NotConnected,
    #[error("bad enumeration: {0}")]
    BadEnumeration(String),
    #[error("refinement became empty at {0}")]
    EmptyRefinement(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("nothing found within search budget: {0}")]
    NotFoundWithinBudget(String),
    #[error("prefix too short: need {need} bits, got {got}")]
    PrefixTooShort { need: usize, got: usize },
    #[error("decision overflow: {0}")]
    DecisionOverflow(String),
    #[error("at level {level}: {source}")]
    AtLevel { level: usize, source: Box<Error> },
    #[error("internal invariant broken: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn at_level(self, level: usize) -> Error {
        match self {
            e @ Error::AtLevel { .. } => e,
            e => Error::AtLevel { level, source: Box::new(e) },
        }
    }

    /// The innermost error, skipping level annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtLevel { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
