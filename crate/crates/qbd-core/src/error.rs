//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QbdError {
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A coupling coefficient vanishes at the given level, which would split
    /// the chain into two non-communicating blocks.
    #[error("trapping state at level {0}: coupling below tolerance")]
    TrappingState(usize),

    #[error("model parameters violate alpha_n^2 + beta_n^2 = 1 at level {level} (deviation {deviation:.3e})")]
    NormalizationViolation { level: usize, deviation: f64 },

    #[error("shape mismatch: expected dimension {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dense solver guard: dimension {n} exceeds limit {limit} (set QBD_MAX_N to override)")]
    DimensionGuard { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no convergence after {0} iterations")]
    ConvergenceFailure(usize),

    #[error("eigensolver failure: {0}")]
    EigensolveFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QbdError>;
