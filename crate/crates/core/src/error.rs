use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = KpcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum KpcError {
    #[error("item {item}: {field} must be at least 1, got {value}")]
    NegativeOrZeroValue {
        item: usize,
        field: &'static str,
        value: i64,
    },

    #[error("index {index} out of range for {n} items")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop on item {0}")]
    SelfLoop(usize),

    #[error("capacity must be non-negative, got {0}")]
    CapacityNegative(i64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid clique partition: {0}")]
    PartitionInvalid(String),

    #[error("invalid solver limits: {0}")]
    LimitsInvalid(String),

    #[error("instance has {0} items; the exhaustive oracle accepts at most 30")]
    TooLargeForOracle(usize),

    #[error("local search start is infeasible")]
    InfeasibleStart,

    #[error("invalid generator spec: {0}")]
    SpecInvalid(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("campaign: {0}")]
    Campaign(String),
}

impl KpcError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        KpcError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        KpcError::Io {
            path: path.into(),
            source,
        }
    }
}
