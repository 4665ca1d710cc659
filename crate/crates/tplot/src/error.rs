//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad dimensions, duplicate ids, dangling references.
    #[error("structural error: {0}")]
    Structural(String),

    /// No directed path between a demanded pair of nodes.
    #[error("no route from `{src}` to `{dst}`")]
    UnreachablePair { src: String, dst: String },

    /// Operation requires a mode the inputs do not satisfy
    /// (e.g. worst-case congestion on a non-homogeneous network).
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),

    /// Exhaustive enumeration refused because the instance is too large.
    #[error("instance size {n} exceeds limit {limit}: {hint}")]
    OverLimit { n: usize, limit: usize, hint: String },

    /// Analytic moments requested for a T-Set whose moment table is absent.
    #[error("no moment table for {kind} at n={n}; precompute one (CLI: `gaussian-params --moment-samples ...` or call `moment_tables`)")]
    MissingMomentTable { kind: String, n: usize },

    /// A capacity allocation would assign a non-positive capacity.
    #[error("degenerate budget: allocation gives non-positive capacity on edges {0:?}")]
    DegenerateBudget(Vec<String>),

    /// Iterative solver failed to reach its tolerance.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
