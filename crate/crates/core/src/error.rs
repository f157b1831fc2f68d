use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by mesh ingestion, descriptor extraction and retrieval.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face at line {line} references vertex {index}, but only {vertex_count} vertices exist")]
    Index {
        line: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported mesh format: {0}")]
    UnsupportedFormat(String),

    #[error("mesh has no vertices or no faces with positive area")]
    EmptyMesh,

    #[error("percentile must lie in (0, 100], got {0}")]
    BadLambda(f64),

    #[error("band limit {requested} exceeds the grid's exact limit {max}")]
    BandLimitTooHigh { requested: usize, max: usize },

    #[error("degree {degree} is outside the band limit {band_limit}")]
    DegreeOutOfRange { degree: usize, band_limit: usize },

    #[error("spherical function has zero total energy")]
    DegenerateNorm,

    #[error("log stabilization requires a nonnegative input, got {0}")]
    NegativeInput(f64),

    #[error("window radius {radius} needs at least {needed} frames, sequence has {len}")]
    WindowTooLarge {
        radius: usize,
        needed: usize,
        len: usize,
    },

    #[error("sample values must be finite")]
    NonFinite,

    #[error("samples were taken on different grids")]
    GridMismatch,

    #[error("sample count {got} does not match grid size {expected}")]
    SampleCount { expected: usize, got: usize },

    #[error("time {t} lies outside the curve's range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("timestamps must be strictly increasing")]
    NonMonotonicTime,

    #[error("descriptor kinds or lengths differ: {0}")]
    KindMismatch(String),

    #[error("curve has no points")]
    EmptyCurve,

    #[error("corpus items do not match the requested metric")]
    MixedTypes,

    #[error("label count {labels} does not match matrix size {size}")]
    LabelMismatch { labels: usize, size: usize },

    #[error("index {index} is out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("every class is a singleton; NN/FT/ST need at least one class with two members")]
    ExplainedSingletons,

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("corpus needs at least two items")]
    CorpusTooSmall,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("descriptor file format error: {0}")]
    Format(String),

    #[error(transparent)]
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

pub type Result<T, E = Error> = std::result::Result<T, E>;
