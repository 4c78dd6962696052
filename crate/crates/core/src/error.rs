//! Error type shared by the library.

use thiserror::Error;

/// Errors raised by game construction and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QreError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid probability vector: {0}")]
    InvalidProfile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("profile is not a fixed point (residual {residual:.3e} > {limit:.3e})")]
    NotAFixedPoint { residual: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, QreError>;
