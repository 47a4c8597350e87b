use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({u}, {v}) out of range for a {n}-node network")]
    EdgeOutOfRange { u: usize, v: usize, n: usize },

    #[error("entry ({row}, {col}) out of range for a {rows}x{cols} pattern")]
    EntryOutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },

    #[error("composite size {size} exceeds the configured cap of {cap} states")]
    SizeCap { size: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("network has {n} nodes, exhaustive search is limited to {max}")]
    TooLarge { n: usize, max: usize },

    #[error("factor network is not self-damped (missing self-loop at node {node})")]
    NotSelfDamped { node: usize },

    #[error("factor network is not strongly connected ({components} components)")]
    NotStronglyConnected { components: usize },

    #[error("factor network is not full S-rank (S-rank {srank} < {n})")]
    NotFullSRank { srank: usize, n: usize },

    #[error("placement does not pass the structural check: {0}")]
    PlacementInvalid(String),

    #[error("composite verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
