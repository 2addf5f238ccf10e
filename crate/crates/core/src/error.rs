use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported layout: {0}")]
    Layout(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distance {0} m outside the UMa validity range [10, 5000] m")]
    DistanceOutOfRange(f64),

    #[error("budget: {0}")]
    Budget(String),

    #[error("ranking for BS {bs} is invalid: {reason}")]
    Ranking { bs: usize, reason: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("estimate Gram matrix is rank deficient (condition number {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("BS {bs} has {associated} associated UEs, {required} needed")]
    NotEnoughUes {
        bs: usize,
        associated: usize,
        required: usize,
    },

    #[error("drop {drop}: {attempts} consecutive invalid realizations; check the configuration ({last})")]
    ResampleLimit {
        drop: usize,
        attempts: usize,
        last: String,
    },

    #[error("empty sample set")]
    EmptySamples,

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

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
    /// Errors that invalidate a single drop realization and trigger a resample.
    pub fn is_resampleable(&self) -> bool {
        matches!(self, Error::RankDeficient { .. } | Error::NotEnoughUes { .. })
    }
}
