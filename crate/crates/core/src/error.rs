use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left}x{left} vs {right}x{right}")]
    Shape {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix data has {len} entries, expected {dim}x{dim}")]
    BadMatrixData { dim: usize, len: usize },

    #[error("Bloch direction must have unit norm (got |n| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("sharpness {0} is outside [0, 1]")]
    SharpnessOutOfRange(f64),

    #[error("alpha = {0} is outside [0, pi/2]")]
    AlphaOutOfRange(f64),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{requested} rounds requested but the sharpness schedule is only valid up to k = {valid_upto}")]
    ScheduleTruncated { requested: usize, valid_upto: usize },

    #[error("behavior table is signaling (residual {residual:.3e} at {location})")]
    Signaling { residual: f64, location: String },

    #[error("behavior table is not normalized: {0}")]
    NotNormalized(String),

    #[error("malformed behavior file: {0}")]
    MalformedBehavior(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("LP solver failed: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
