use std::fmt;

/// Errors produced by group arithmetic, constructions and searches.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("spec mismatch: {0}")]
    SpecMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index {index} out of range (have {len})")]
    IndexOutOfRange { index: usize, len: usize },

    /// A search or construction was truncated at a resource cap.
    #[error("resource limit exceeded: {what} (cap {cap})")]
    ResourceLimit {
        what: String,
        cap: usize,
        stats: Option<SearchStatsSnapshot>,
    },

    #[error("malformed witness: {0}")]
    MalformedWitness(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Partial search statistics attached to a truncated search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStatsSnapshot {
    pub visited: usize,
    pub max_frontier: usize,
    pub depth_reached: usize,
}

impl fmt::Display for SearchStatsSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "visited {}, max frontier {}, depth {}",
            self.visited, self.max_frontier, self.depth_reached
        )
    }
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn mismatch(message: impl Into<String>) -> Self {
        Error::SpecMismatch(message.into())
    }
}
