use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("objective vector needs at least 2 entries, got {0}")]
    TooFewObjectives(usize),

    #[error("non-finite objective value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown identifier: {0}")]
    Unknown(String),

    #[error("algorithm {0} is reserved but not implemented")]
    NotImplemented(String),

    #[error("malformed trace: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
