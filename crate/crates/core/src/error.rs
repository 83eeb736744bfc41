use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sample: at least one observation is required")]
    EmptySample,
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("unknown setting {0}")]
    UnknownSetting(u32),
    #[error("no context for setting pair ({0}, {1})")]
    UnknownContext(u32, u32),
    #[error("missing correlation entry for setting pair ({0}, {1})")]
    MissingEntry(u32, u32),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("unsupported density family for this operation: {0}")]
    UnsupportedDensity(String),
    #[error("invalid collision configuration: {0}")]
    InvalidConfig(String),
    #[error("speed must be positive, got {0}")]
    NonPositiveSpeed(f64),
    #[error("value {0} lies outside [-1, 1]")]
    OutOfRange(String),
    #[error("unsupported number of variables: {0} (supported: 3 or 4)")]
    UnsupportedSize(usize),
    #[error("invalid marginal problem: {0}")]
    InvalidProblem(String),
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
