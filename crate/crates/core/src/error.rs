//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by state construction, tomogram evaluation, and
/// reconstruction routines.
#[derive(Debug, Error)]
pub enum TomoError {
    /// Input data violates a documented invariant (bad JSON, an
    /// unnormalized state, a malformed grid specification, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must agree on mode count or matrix dimension
    /// do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A tomographic frame is unusable for the requested operation,
    /// e.g. all (mu_j, nu_j) pairs vanish.
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    /// An iterative or adaptive numerical routine failed to reach its
    /// target accuracy.
    #[error("non-convergent computation: {0}")]
    NonConvergent(String),
}

impl From<serde_json::Error> for TomoError {
    fn from(err: serde_json::Error) -> Self {
        TomoError::InvalidInput(format!("JSON error: {err}"))
    }
}

pub type Result<T> = std::result::Result<T, TomoError>;
