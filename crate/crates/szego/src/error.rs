//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by the spectral transform.
#[derive(Debug, Error)]
pub enum SzegoError {
    /// Input violates a structural requirement (sign, ordering, size).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A function expected in the Hardy space has a pole in the closed
    /// upper half-plane or a non-decaying polynomial part.
    #[error("not a Hardy-class function: {0}")]
    NotHardy(String),

    /// A Gram or resolvent matrix is too ill-conditioned to trust.
    #[error("ill-conditioned {what}: condition number {cond:.3e}")]
    IllConditioned { what: &'static str, cond: f64 },

    /// A linear system that should be invertible is numerically singular.
    #[error("singular matrix in {0}")]
    Singular(&'static str),

    /// An iterative eigenvalue or root solver did not converge.
    #[error("no convergence in {0}")]
    NoConvergence(&'static str),

    /// A derived quantity failed an internal consistency check.
    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SzegoError>;
