use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Every structured failure carries a stable machine-readable `kind()` so the
/// CLI can emit it as JSON and map it onto an exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no multiplier q <= {qmax} brings the smoothness norm under {ceiling}")]
    NoQFound { qmax: u64, ceiling: f64 },

    #[error("work budget exceeded: need {needed} operations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("unsupported manifold: {0}")]
    UnsupportedManifold(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(usize, usize),

    #[error("function is not 1-bounded (sup norm {0})")]
    Unbounded(f64),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Overflow(_) => "overflow",
            Error::PreconditionViolated(_) => "precondition-violated",
            Error::NoQFound { .. } => "no-q-found",
            Error::BudgetExceeded { .. } => "budget-exceeded",
            Error::UnsupportedManifold(_) => "unsupported-manifold",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::ModulusMismatch(..) => "modulus-mismatch",
            Error::Unbounded(_) => "unbounded-input",
            Error::NotFound(_) => "not-found",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
