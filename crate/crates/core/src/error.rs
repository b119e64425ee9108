use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("support-table norm has no table loaded")]
    ModelNotReady,
    #[error("norm is not differentiable at the given point")]
    NotSmoothHere,
    #[error("norm is not strictly convex: {0}")]
    NotStrictlyConvex(String),
    #[error("point is not on the unit sphere of the norm (|norm - 1| = {0:e})")]
    NotOnSphere(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("glue arc construction failed: {0}")]
    GlueFailed(String),
    #[error("splitting angle {0} is not inside (0, pi)")]
    DegenerateSplitting(f64),
    #[error("kernels of the two linear maps differ (defect {0:e})")]
    KernelMismatch(f64),
    #[error("requested generation would produce {0} points")]
    TooLarge(u64),
    #[error("map with ratio {0} is not contracting")]
    NotContracting(f64),
    #[error("box size {delta:e} is below twice the cloud resolution {resolution:e}")]
    UnderResolved { delta: f64, resolution: f64 },
    #[error("least-squares fit has r2 = {r2:.6} < {min_r2}")]
    LowQualityFit { r2: f64, min_r2: f64, slope: f64 },
    #[error("not enough admissible scales: {0} (need at least 4)")]
    TooFewScales(usize),
    #[error("table I/O: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
