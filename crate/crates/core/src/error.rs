use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("context dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("context coordinate {index} = {value} lies outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: f64 },

    #[error("budget {budget} is below the per-worker price {price}")]
    BudgetBelowPrice { budget: f64, price: f64 },

    #[error("quality {quality} outside [{q_min}, {q_max}]")]
    QualityOutOfRange {
        quality: f64,
        q_min: f64,
        q_max: f64,
    },

    #[error("a quality value was supplied for a declined request")]
    QualityWithoutAcceptance,

    #[error("no workers available")]
    NoWorkersAvailable,

    #[error("observation for worker {0} which was not selected")]
    NotSelected(usize),

    #[error("check-in line {line}: {reason}")]
    MalformedCheckin { line: usize, reason: String },

    #[error("check-in pool has {found} distinct users, {required} required")]
    InsufficientUsers { found: usize, required: usize },

    #[error("config line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),

    #[error("horizon {requested} exceeds trace length {available}")]
    HorizonExceedsTrace { requested: usize, available: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
