use thiserror::Error;

use crate::tour::TourViolation;
use crate::tsplib::ParseError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid tour: {0}")]
    InvalidTour(#[from] TourViolation),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("no feasible move for n = {n}: {reason}")]
    InfeasibleMove { n: usize, reason: String },
    #[error("metric {requested} cannot be used on an instance declared as {declared}")]
    MetricMismatch { requested: String, declared: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
