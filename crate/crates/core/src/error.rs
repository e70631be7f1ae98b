use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("row {row} has zero norm under the cosine metric")]
    ZeroNormRow { row: usize },

    #[error("given beta {beta} must exceed the maximum cost {max_cost}")]
    BetaTooSmall { beta: f64, max_cost: f64 },

    #[error("negative or non-finite value {value} at index {index}")]
    InvalidValue { index: usize, value: f64 },

    #[error("mass mismatch: source {source_mass} vs target {target_mass}")]
    MassMismatch { source_mass: f64, target_mass: f64 },

    #[error("source mass {source_mass} exceeds target capacity {capacity}")]
    CapacityExceeded { source_mass: f64, capacity: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("budget {k} is invalid for {what}")]
    InvalidBudget { k: usize, what: String },

    #[error("index {index} out of range (size {size})")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("index {0} is already in the set")]
    AlreadySelected(usize),

    #[error("remaining capacity {total} is below the unit mass of a new prototype")]
    InsufficientCapacity { total: f64 },

    #[error("brute-force guard exceeded: C({m},{k}) = {count} subsets")]
    GuardExceeded { m: usize, k: usize, count: u128 },

    #[error("network simplex did not terminate within {0} pivots")]
    PivotLimit(usize),

    #[error("transport problem is infeasible (residual artificial flow {0})")]
    Infeasible(f64),

    #[error("infeasible skew: {0}")]
    InfeasibleSkew(String),

    #[error("missing labels: {0}")]
    MissingLabels(String),

    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: non-numeric cell {value:?} at row {row}, column {column:?}")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable numeric code for the CLI exit status and machine-readable logs.
    pub fn code(&self) -> i32 {
        match self {
            Error::Io { .. } => 10,
            Error::RaggedRow { .. } => 11,
            Error::NonNumeric { .. } => 12,
            Error::Format { .. } | Error::Csv(_) => 13,
            Error::InfeasibleSkew(_) => 20,
            Error::InvalidBudget { .. } => 21,
            Error::MissingLabels(_) => 22,
            Error::GuardExceeded { .. } => 23,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
