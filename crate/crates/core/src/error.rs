use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shapelet index: q = {q} is not below s_max = {s_max}")]
    InvalidIndex { q: usize, s_max: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series too short: length {len}, need at least {min}")]
    TooShort { len: usize, min: usize },

    #[error("parse error on line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("inconsistent shape: {0}")]
    Shape(String),

    #[error("segmentation did not converge before the transaction cost reached 1 (last tried {epsilon})")]
    NoConvergence { epsilon: f64 },

    #[error("unknown series id {0:?}")]
    UnknownId(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
