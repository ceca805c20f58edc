use std::path::PathBuf;

use thiserror::Error;

use crate::metrics::Metric;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the pipeline can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no input files matched {patterns:?}")]
    EmptyInput { patterns: Vec<String> },

    #[error("{path}: invalid UTF-8 at byte offset {offset}")]
    Utf8 { path: PathBuf, offset: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: bad glob pattern: {message}")]
    Pattern { path: String, message: String },

    #[error("{path}: line {line}: {message}")]
    Line {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid document {id:?}: {reason}")]
    InvalidDocument { id: String, reason: String },

    #[error("invalid corpus: {0}")]
    InvalidCorpus(String),

    #[error("empty token")]
    EmptyToken,

    #[error("corpus has an empty vocabulary after tokenization")]
    EmptyVocabulary,

    #[error("candidate pool is empty (min_count={min_count}, min_df={min_df})")]
    EmptyPool { min_count: u64, min_df: u64 },

    #[error("{metric} is not applicable: {reason}")]
    MetricInapplicable { metric: Metric, reason: String },

    #[error("no applicable metrics: {0:?}")]
    NoMetrics(Vec<String>),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("rankings cover different pools ({difference} terms in the symmetric difference)")]
    PoolMismatch { difference: usize },

    #[error("stopword list {0} contains no words")]
    EmptyList(String),

    #[error("language mismatch: {0:?}")]
    LanguageMismatch(Vec<String>),

    #[error("term {0:?} does not occur in the corpus")]
    StaleCandidate(String),

    #[error("review sheets come from different runs: {0:?}")]
    RunMismatch(Vec<String>),

    #[error("malformed review sheet {source_name}: {message}")]
    ReviewSheet { source_name: String, message: String },

    #[error("store version conflict for {lang}: expected {expected}, found {found}")]
    VersionConflict {
        lang: String,
        expected: u64,
        found: u64,
    },

    #[error("store for {0} is locked by another writer")]
    StoreLocked(String),

    #[error("k={k} is outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by how the caller asked for something rather
    /// than by the data it pointed at.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::KOutOfRange { .. } | Error::InvalidArgument(_) | Error::Pattern { .. }
        )
    }
}
