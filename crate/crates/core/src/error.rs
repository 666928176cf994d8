use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("denominator below {eps:e} px for {measure}")]
    DivisionDegenerate { measure: &'static str, eps: f64 },

    #[error("region {region} has too few pixels ({pixels})")]
    EmptyRegion { region: String, pixels: usize },

    #[error("numerically degenerate: {0}")]
    NumericDegenerate(String),

    #[error("no pixel has an edge magnitude above the threshold")]
    NoEdges,

    #[error("ITA undefined for L = 50, b = 0")]
    UndefinedIta,

    #[error("pose class {0} is not frontal")]
    InvalidPose(u8),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("no annotator votes")]
    NoVotes,

    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("invalid bin policy: {0}")]
    InvalidBins(String),

    #[error("feature table is empty")]
    EmptyTable,

    #[error("expected 68 keypoints, got {0}")]
    KeypointCount(usize),

    #[error("invalid record: {0}")]
    InvalidRecord(String),

    #[error("manifest line {line}: {message}")]
    ManifestParse { line: usize, message: String },

    #[error("cannot read image {path}: {message}")]
    ImageRead { path: PathBuf, message: String },

    #[error("invalid feature table: {0}")]
    FeatureParse(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
