//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge ({i}, {j}) for a graph on {n} vertices")]
    InvalidEdge { i: usize, j: usize, n: usize },

    #[error("vertex count mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A (n, kind) combination the model does not admit, e.g. an odd-order
    /// perfect matching.
    #[error("model error: {0}")]
    Model(String),

    #[error("parameter error: {0}")]
    Param(String),

    /// Formulas that divide by p (or by q_k) reject the degenerate endpoints
    /// instead of special-casing them.
    #[error("degenerate model: {0}")]
    Degenerate(String),

    /// Exact computations that enumerate exhaustively refuse inputs beyond
    /// their stated capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
