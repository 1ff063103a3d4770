//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors from validation and numeric evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside a function's domain (e.g. `x <= 0` for `log_gamma`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Two sequences that must have equal lengths do not.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    /// A weight vector violates the simplex invariant.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// An opinion pool violates its invariants.
    #[error("invalid pool: {0}")]
    InvalidPool(String),

    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A computation produced a non-finite or otherwise unusable value.
    #[error("non-finite result: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
