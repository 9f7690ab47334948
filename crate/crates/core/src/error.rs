use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("corpus needs at least 2 tokens, found {0}")]
    CorpusTooSmall(usize),

    #[error("unknown token `{0}`")]
    UnknownToken(String),

    #[error("unknown artifact id `{0}`")]
    UnknownArtifact(String),

    #[error("duplicate artifact id `{0}`")]
    DuplicateArtifact(String),

    #[error("link references missing artifact id `{0}`")]
    DanglingLink(String),

    #[error("empty artifact")]
    EmptyArtifact,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("gradient overflow")]
    GradientOverflow,

    #[error("non-finite parameter update")]
    NonFiniteUpdate,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no positive links in split")]
    NoPositives,

    #[error("no includable queries")]
    NoQueries,

    #[error("empty gold set")]
    EmptyGold,

    #[error("insufficient test pairs: need {needed}, have {available}")]
    InsufficientTestPairs { needed: usize, available: usize },

    #[error("vocabulary too small: {0}")]
    VocabTooSmall(String),

    #[error("missing forward cache")]
    MissingCache,

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

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
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by numeric divergence rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::GradientOverflow | Error::NonFiniteUpdate)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
