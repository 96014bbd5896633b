use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },

    #[error("invalid stability grade `{0}` (expected one of A, B, C, D, E)")]
    GradeParse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },

    #[error("frame index {index} out of range (valid: 1..={max})")]
    FrameIndex { index: usize, max: usize },

    #[error("sub-metric {metric} is not legal for task {task}")]
    IllegalSubMetric { metric: String, task: String },

    #[error("score for sample `{0}` has no matching manifest entry")]
    UnknownSample(String),

    #[error("no comparisons recorded for model `{0}`")]
    MissingModel(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("correlation undefined: {0} is constant")]
    ConstantVector(&'static str),

    #[error("singular calibration fit when leaving out point {0}: predictor has zero variance")]
    SingularFit(usize),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }
}
