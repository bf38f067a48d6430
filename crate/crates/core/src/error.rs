use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit index {index} out of range for length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("rank {rank} out of range: only {count} matching bits")]
    RankOutOfRange { rank: usize, count: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("space report undefined for an empty vector")]
    EmptyVector,
}
