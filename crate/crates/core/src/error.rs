use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates an operation's precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A Fock index does not fit in the truncated space.
    #[error("Fock index {index} out of range for dimension {dim}")]
    OutOfRange { index: usize, dim: usize },

    /// Probability mass beyond the truncation exceeds the tail tolerance.
    #[error("truncation tail mass {tail:.3e} exceeds tolerance {tolerance:.3e} at dimension {dim}")]
    Truncation { tail: f64, tolerance: f64, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// Outcome probability below the conditioning floor.
    #[error("outcome probability {probability:.3e} below floor {floor:.1e}")]
    ProbabilityUnderflow { probability: f64, floor: f64 },

    #[error("operator is not a valid {expected}: {reason}")]
    InvalidOperator { expected: &'static str, reason: String },

    /// Adaptive quadrature or grid failed to reach its target.
    #[error("no convergence in {what}: {detail}")]
    Convergence { what: &'static str, detail: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
