use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("missing context")]
    MissingContext,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid episode: {0}")]
    InvalidEpisode(String),

    #[error("empty glyph")]
    EmptyGlyph,

    #[error("degenerate stroke")]
    DegenerateStroke,

    #[error("sample count mismatch: {0} vs {1}")]
    SampleCountMismatch(usize, usize),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error("class {class:?} has {available} train records, need {needed}")]
    NotEnoughRecords {
        class: String,
        available: usize,
        needed: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error on {path}: {source}")]
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
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
