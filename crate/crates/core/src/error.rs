use thiserror::Error;

use crate::solvers::RecoveryOutput;

pub type Result<T> = std::result::Result<T, MmpError>;

#[derive(Debug, Error)]
pub enum MmpError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("index {0} already on the path")]
    DuplicateIndex(usize),

    #[error("requested {requested} indices but only {available} are available")]
    NotEnoughIndices { requested: usize, available: usize },

    #[error("rank-deficient column subset {support:?}")]
    RankDeficient { support: Vec<usize> },

    /// Every path died of rank deficiency before reaching the target depth.
    #[error("search exhausted at depth {} of {target}", best.support.len())]
    PartialRecovery {
        best: Box<RecoveryOutput>,
        target: usize,
    },

    #[error("{subsets} column subsets exceed the exact-enumeration guard of {limit}; use a sampling estimate instead")]
    GuardExceeded { subsets: u128, limit: u128 },

    #[error("restricted isometry constant of order {0} missing from report")]
    MissingOrder(usize),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("plot error: {0}")]
    Plot(String),
}
