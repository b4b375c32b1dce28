//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero signal")]
    ZeroSignal,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("solver aborted: {0}")]
    SolverAbort(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
