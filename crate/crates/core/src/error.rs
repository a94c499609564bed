use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error in record {record} (line {line}): {variable} = {value} {reason}")]
    Validation {
        record: String,
        line: u64,
        variable: &'static str,
        value: f64,
        reason: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("degenerate range for {variable}: min == max == {value}")]
    DegenerateRange { variable: &'static str, value: f64 },

    #[error("bounds for {variable} are unresolved; derive them from data first")]
    UnresolvedBounds { variable: &'static str },

    #[error("dataset is already normalized")]
    AlreadyNormalized,

    #[error("dataset is not normalized")]
    NotNormalized,

    #[error(
        "insufficient records: requested {requested} per class, have {conflict} conflict and {peace} peace"
    )]
    InsufficientClass {
        requested: usize,
        conflict: usize,
        peace: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("only one class present; both peace and conflict are required")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver did not converge after {passes} passes (max KKT violation {violation:e})")]
    NotConverged { passes: usize, violation: f64 },

    #[error("non-finite loss at SCG iteration {iteration}")]
    NonFiniteLoss { iteration: usize },

    #[error("AUC {0} is degenerate (zero variance)")]
    DegenerateAuc(f64),

    #[error("non-positive variance under the root of the z statistic ({0:e}); r is inconsistent")]
    NonPositiveVariance(f64),

    #[error("every grid cell failed")]
    AllCellsFailed,

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad input (files, shapes, parameters) rather
    /// than by a computation that ran and failed.
    pub fn is_input_error(&self) -> bool {
        if let Error::Stage { source, .. } = self {
            return source.is_input_error();
        }
        !matches!(
            self,
            Error::NotConverged { .. }
                | Error::NonFiniteLoss { .. }
                | Error::AllCellsFailed
                | Error::DegenerateAuc(_)
                | Error::NonPositiveVariance(_)
        )
    }
}
