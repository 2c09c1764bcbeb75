use thiserror::Error;

/// Errors produced anywhere in the design pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid range: lo = {lo} > hi = {hi} ({what})")]
    InvalidRange { what: String, lo: f64, hi: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("degenerate denominator: homogenizing variable t = {0:e}")]
    DegenerateDenominator(f64),

    #[error("no nonzero Hermitian direction in the constraint nullspace (rank {rank}, {constraints} constraints)")]
    NoNullspace { rank: usize, constraints: usize },

    #[error("no sign change found while bracketing the root")]
    BracketFailure,

    #[error("rate floor {mi0} unreachable at the power budget (best rate {best})")]
    InfeasibleStart { mi0: f64, best: f64 },

    #[error("design stalled: {0}")]
    Stalled(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
