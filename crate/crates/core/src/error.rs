use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = GiktError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum GiktError {
    #[error("dimension error in {op}: {lhs:?} vs {rhs:?}")]
    Dimension {
        op: &'static str,
        lhs: Vec<usize>,
        rhs: Vec<usize>,
    },

    #[error("index error: id {id} out of range for {len} rows")]
    Index { id: usize, len: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("empty selection: {0}")]
    EmptySelection(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("split error: {0}")]
    Split(String),

    #[error("graph construction error: {0}")]
    Graph(String),

    #[error("load error: {0}")]
    Load(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("training diverged at epoch {epoch}, batch {batch}: {reason}")]
    Diverged {
        epoch: usize,
        batch: usize,
        reason: String,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GiktError {
    pub fn dim(op: &'static str, lhs: &[usize], rhs: &[usize]) -> Self {
        GiktError::Dimension {
            op,
            lhs: lhs.to_vec(),
            rhs: rhs.to_vec(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GiktError::Io {
            path: path.into(),
            source,
        }
    }
}
