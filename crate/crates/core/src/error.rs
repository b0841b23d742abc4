use thiserror::Error;

/// Errors produced by the construction and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed word: {0}")]
    MalformedWord(String),
    #[error("word has an empty tail; extend it before asking for a cylinder")]
    EmptyTail,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("no tuple lies inside the continuant window")]
    EmptyWindow,
    #[error("enumeration of {requested} items exceeds the budget of {budget}")]
    BudgetExceeded { requested: f64, budget: f64 },
    #[error("product atom of mass {atom} exceeds 1/2")]
    AtomTooHeavy { atom: String },
    #[error("block {index} is not in the support of the block measure")]
    NotInSupport { index: usize },
    #[error("value with about {digits:.0} decimal digits exceeds the digit budget of {budget}{}", at.map(|k| format!(" (at step {k})")).unwrap_or_default())]
    Overflow {
        digits: f64,
        budget: u64,
        at: Option<usize>,
    },
    #[error("depth {requested} exceeds the built depth {built}")]
    DepthExceeded { requested: usize, built: usize },
    #[error("scale index {index} is outside the built range (depth {built})")]
    OutOfRange { index: u64, built: usize },
    #[error("psi table does not cover q = {0}")]
    OutsideTable(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
