use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid binary word {0:?}: expected only '0' and '1'")]
    InvalidWord(String),

    #[error("coordinate {coord} constrained twice with conflicting bits")]
    ConflictingConstraint { coord: usize },

    #[error("depth {depth} exceeds the enumeration cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },

    #[error("truth table has {got} entries, expected {expected}")]
    TruthTableSize { expected: usize, got: usize },

    #[error("prefix of length {got} is too short, need at least {needed}")]
    InsufficientPrefix { needed: usize, got: usize },

    #[error("invalid probability {0}: must be a fraction in [0, 1]")]
    InvalidProbability(String),

    #[error("conditioning set has measure zero")]
    ZeroConditioningMass,

    #[error("table is not a bijection: {0}")]
    NotABijection(String),

    #[error("invalid test stage: level {level} has measure {measure}, bound {bound}")]
    InvalidTest {
        level: usize,
        measure: String,
        bound: String,
    },

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("invalid recovery configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid recovery instance: {0}")]
    InvalidInstance(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no candidate for coordinate {n} reached the threshold within bound {bound}")]
    NotFound { n: usize, bound: usize },

    #[error("coordinate {n} has {count} candidates at or above the threshold")]
    Ambiguous { n: usize, count: usize },

    #[error("recovered map is not injective: coordinates {first} and {second} both map to {target}")]
    NonInjective {
        first: usize,
        second: usize,
        target: usize,
    },

    #[error("invalid corruption mass {0}")]
    InvalidMass(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}
