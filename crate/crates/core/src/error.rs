use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("unknown author `{0}`")]
    UnknownAuthor(String),
    #[error("unknown scoring method `{0}`")]
    UnknownMethod(String),
    #[error("topic `{0}` has no vector")]
    MissingVector(String),
    #[error("topic `{0}` has a zero-norm vector")]
    ZeroVector(String),
    #[error("vector for `{label}` has dimension {found}, expected {expected}")]
    VectorDimension {
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("train and test networks share no authors or no topics")]
    EmptyOverlap,
    #[error("{scores} scores supplied for {candidates} candidates")]
    ScoreCountMismatch { candidates: usize, scores: usize },
    #[error("ROC undefined: no {0} examples")]
    OneClass(&'static str),
    #[error("invalid probe set: {0}")]
    InvalidProbe(String),
    #[error("no topic counts to measure diversity on")]
    EmptyCounts,
    #[error("invalid community assignment: {0}")]
    InvalidAssignment(String),
    #[error("worker pool: {0}")]
    WorkerPool(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
