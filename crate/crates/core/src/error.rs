use thiserror::Error;

/// Errors raised by the swap-algebra engine, the exact 1D model, the dense
/// oracle and the analytic bounds.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site count {0} exceeds the 64-site mask limit")]
    TooManySites(usize),
    #[error("site {site} is outside a {n}-site universe")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("regions live on different universes ({left} vs {right} sites)")]
    MismatchedSites { left: usize, right: usize },
    #[error("local region {local} does not straddle target {target}")]
    NotInBoundary { local: String, target: String },
    #[error("local dimension must be at least 2, got {0}")]
    LocalDimension(u32),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("operation needs a {expected} policy")]
    PolicyMismatch { expected: &'static str },
    #[error("step index {index} out of range for {len} per-step weight vectors")]
    StepOutOfRange { index: usize, len: usize },
    #[error("resource cap exceeded: {0}")]
    CapExceeded(String),
    #[error("ambiguous numerical rank: singular value {value:e} sits too close to tolerance {tol:e}")]
    AmbiguousRank { value: f64, tol: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
