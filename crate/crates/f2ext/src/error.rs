use crate::f2core::F2Matrix;

/// Errors surfaced by fallible operations. Width mismatches between values
/// that are supposed to live in the same space are programming errors and
/// panic instead.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} = {requested} exceeds the supported limit {limit}")]
    CapExceeded {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    #[error("failed to sample a full-rank {rows}x{cols} matrix in {attempts} attempts")]
    RankSamplingFailed {
        rows: usize,
        cols: usize,
        attempts: usize,
    },
    #[error("distribution has min-entropy below the required {required}")]
    EntropyTooLow { required: String },
    #[error("sumset relation violated at a = {a}, b = {b}")]
    SumsetRelationViolated { a: String, b: String },
    #[error("polynomial map has degree {degree}, expected at most {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("input reduction failed: best good fraction {best_fraction} after {attempts} attempts")]
    ReductionFailed {
        best_fraction: String,
        best_matrix: Box<F2Matrix>,
        attempts: usize,
    },
    #[error("arithmetic overflow in exact rational bookkeeping")]
    Overflow,
    #[error("checkpoint does not match the search parameters (hash {found}, expected {expected})")]
    CheckpointMismatch { found: String, expected: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
