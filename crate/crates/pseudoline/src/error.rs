use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed wiring diagram at crossing {index}: {reason}")]
    MalformedDiagram { index: usize, reason: String },

    #[error("not a full simple arrangement: {0}")]
    NotFullArrangement(String),

    #[error("unknown face id {0}")]
    UnknownFace(usize),

    #[error("bad tunnel width {w} for n={n} (need 1 <= w <= n+1)")]
    BadWidth { w: usize, n: usize },

    #[error("bad level {level} for n={n}")]
    BadLevel { level: usize, n: usize },

    #[error("lines {0} and {1} are parallel")]
    ParallelLines(usize, usize),

    #[error("coincident crossings: {0}")]
    CoincidentCrossings(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("perturbation failure: could not certify a simple arrangement")]
    PerturbationFailure,

    #[error("subset cannot be glued: connector face {0} already in use")]
    UngluableSubset(usize),

    #[error("coloring must use both colors")]
    MonochromaticColoring,

    #[error("audit failure: {message}")]
    AuditFailure { message: String, trace: Vec<String> },

    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn audit(message: impl Into<String>, trace: Vec<String>) -> Self {
        Error::AuditFailure {
            message: message.into(),
            trace,
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Error::InternalInvariant(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
