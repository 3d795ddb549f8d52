use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the alignment pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate url: {0}")]
    DuplicateUrl(String),

    #[error("url occurs in more than one gold pair on the {side} side: {url}")]
    RepeatedPairUrl { side: &'static str, url: String },

    #[error("unknown url: {0}")]
    UnknownUrl(String),

    #[error("unknown domain: {0}")]
    UnknownDomain(String),

    #[error("language {lang:?} of {url} is not one of the configured languages")]
    UnexpectedLanguage { url: String, lang: String },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty pair list")]
    EmptyPairs,

    #[error("term count must be at least 1")]
    ZeroCount,

    #[error("rank {rank} is invalid for a {rows}x{cols} matrix")]
    InvalidRank { rank: usize, rows: usize, cols: usize },

    #[error("matrix has no nonzero entries")]
    ZeroMatrix,

    #[error("singular value {index} is zero; retrain with a rank below {index}")]
    SingularValueZero { index: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("model was trained on a different vocabulary")]
    FingerprintMismatch,

    #[error("bad model file: {0}")]
    BadModel(String),

    #[error("token {0:?} has no url count")]
    MissingTokenCount(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
