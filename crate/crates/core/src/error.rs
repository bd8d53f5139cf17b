use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus: no tokens to build a vocabulary from")]
    EmptyCorpus,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {file} at line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("corrupt binary table at byte offset {offset}: {message}")]
    Corrupt { offset: u64, message: String },

    #[error("missing pre-trained vectors for {} word(s): {}", .0.len(), .0.join(", "))]
    MissingVectors(Vec<String>),

    #[error("no valid sense outcome: gamma is 0 and the word has no senses")]
    NoSenseOutcome,

    #[error("unknown target: {0}")]
    UnknownTarget(String),

    #[error("universe mismatch: {count} discrepant instance(s), first: {}", .first.join(", "))]
    UniverseMismatch { count: usize, first: Vec<String> },

    #[error("empty test set in split {0}")]
    EmptyTestSet(usize),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    RawIo(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.into(),
            line,
            message: message.into(),
        }
    }
}
