use std::path::PathBuf;

use crate::model::PlaceKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error: {0}")]
    Stream(#[from] std::io::Error),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("domain {domain:?} appears on both the low- and high-credibility lists")]
    SourceOverlap { domain: String },

    #[error("invalid source list entry {entry:?}: {reason}")]
    InvalidSource { entry: String, reason: &'static str },

    #[error("duplicate gazetteer entry {name:?} ({kind})")]
    DuplicatePlace { name: String, kind: PlaceKind },

    #[error("duplicate vaccine record for {region} on {date}")]
    DuplicateDoses { date: chrono::NaiveDate, region: String },

    #[error("unknown region code {0:?}")]
    UnknownRegion(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("undefined result: {0}")]
    Undefined(String),

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
