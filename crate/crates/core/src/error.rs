use thiserror::Error;

/// Errors produced by the core algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("scale does not match field: {0}")]
    ScaleMismatch(String),

    #[error("denominator of {0} is not a power of {1}")]
    DenominatorNotPrimePower(String, u64),

    #[error("precision mismatch: {0}")]
    PrecisionMismatch(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} needs {required} steps, budget is {limit}")]
    BudgetExceeded { what: String, required: String, limit: u64 },

    #[error("unsupported curve: {0}")]
    UnsupportedCurve(String),

    #[error("{j} is not invertible modulo a power of {p}")]
    NotInvertible { j: usize, p: u64 },

    #[error("sampling grid is empty")]
    EmptyGrid,

    #[error("zero function")]
    ZeroFunction,

    #[error("curve is degenerate: its Wronskian vanishes on the unit interval")]
    DegenerateCurve,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, required: impl ToString, limit: u64) -> Self {
        Error::BudgetExceeded {
            what: what.into(),
            required: required.to_string(),
            limit,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
