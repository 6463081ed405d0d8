//! Error type shared by the solver and diagnostics layers.

use thiserror::Error;

/// Errors produced by grid operations, the time steppers and diagnostics.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("linear solver did not converge within {iterations} iterations (relative residual {residual:e})")]
    SolveDiverged { iterations: usize, residual: f64 },

    #[error("non-finite value detected in {0}")]
    NonFinite(&'static str),

    #[error("explicit stability guard violated: dt = {dt:e} exceeds limit {limit:e}")]
    StabilityGuard { dt: f64, limit: f64 },

    #[error("negative radicand: min(v + alpha) = {min:e}")]
    NegativeRadicand { min: f64 },

    #[error("{0}")]
    Diagnostics(String),
}

pub type Result<T> = std::result::Result<T, Error>;
