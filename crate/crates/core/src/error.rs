use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error("declared shape {shape:?} needs {expected} payload bytes, found {found}")]
    SizeMismatch {
        shape: Vec<usize>,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value at flat position {0}")]
    NonFinite(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty group")]
    EmptyGroup,

    #[error("index {index} out of range for group of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget {budget} exceeds available samples {available}")]
    BudgetTooLarge { budget: usize, available: usize },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error("ones-fraction {requested} unattainable; maximum attainable is {max_attainable}")]
    RatioUnattainable { requested: f64, max_attainable: f64 },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
