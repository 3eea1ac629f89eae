use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("facet {0} has a zero normal vector")]
    ZeroRow(usize),

    #[error("a bounded body in dimension {dim} needs at least {needed} facets, got {got}")]
    TooFewFacets { dim: usize, needed: usize, got: usize },

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("polytope has an empty interior (Chebyshev radius {0:e})")]
    EmptyInterior(f64),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("geometry failure: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("statistic undefined: {0}")]
    Undefined(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
