use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("sieve limit {requested} exceeds cap {cap}")]
    ResourceExhausted { requested: u64, cap: u64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("row {0} has zero norm")]
    DegenerateRow(usize),

    #[error("row {row} is not unit-normalized (norm {norm})")]
    NotNormalized { row: usize, norm: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("injectivity violated: {0}")]
    InjectivityViolation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed prime cache: {0}")]
    MalformedCache(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
