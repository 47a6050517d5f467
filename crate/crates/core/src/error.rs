//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by network construction, experiment setup, and training.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes of two objects that must agree do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A numeric argument or field violates its contract.
    #[error("invalid value: {0}")]
    InvalidValue(String),
    /// A requested computation exceeds the desk-scale feasibility guard.
    #[error("infeasible request: {0}")]
    Infeasible(String),
    /// An iterative optimization produced non-finite values.
    #[error("optimization diverged: {0}")]
    Diverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
