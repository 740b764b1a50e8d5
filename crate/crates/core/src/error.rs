use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of zeta at s = 1")]
    Pole,

    #[error("accuracy target {target:e} not reached (best bound {achieved:e}): {context}")]
    Accuracy {
        target: f64,
        achieved: f64,
        context: String,
    },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("grid does not cover the requested range: {0}")]
    Coverage(String),

    #[error("grid spacing {spacing} too coarse; at most {required} is needed")]
    SpacingTooCoarse { spacing: f64, required: f64 },

    #[error("paper-mode infeasible at this T: {0}")]
    PaperModeInfeasible(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contour quadrature did not converge at {nodes} nodes per circle (last iterates {previous:e}, {last:e})")]
    NotConverged {
        nodes: usize,
        previous: f64,
        last: f64,
    },

    #[error("corrupt cache file {path}: {reason}")]
    CorruptCache { path: PathBuf, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl LabError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }
}
