//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("column {0:?} not found")]
    ColumnNotFound(String),

    #[error("non-numeric cell {value:?} at data row {row}, column {column}")]
    NonNumericCell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("non-finite value at data row {row}, column {column}")]
    NonFiniteValue { row: usize, column: String },

    #[error("need at least {min} valid rows, got {got}")]
    TooFewRows { min: usize, got: usize },

    #[error("subsample size {requested} out of range 2..={available}")]
    SubsampleOutOfRange { requested: usize, available: usize },

    #[error("ties present on axis {axis} ({groups} tied groups) with tie policy `error`")]
    TiesPresent { axis: &'static str, groups: usize },

    #[error("axis {0} is degenerate (fewer than 2 distinct values)")]
    DegenerateAxis(&'static str),

    #[error("{what} out of range: {value}")]
    ArgumentOutOfRange { what: &'static str, value: f64 },

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse model spec {spec:?}: {reason}")]
    ModelParse { spec: String, reason: String },

    #[error("split at theta={theta} leaves an empty side")]
    EmptySplitSide { theta: f64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
