use thiserror::Error;

/// Errors shared across the library.
///
/// Numerical routines that fail to meet their tolerance report the best
/// residual they reached so callers can decide whether to retry or drop the
/// point.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty spectrum")]
    EmptySpectrum,

    #[error("lower half-plane: Im z = {0} must be positive")]
    LowerHalfPlane(f64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("eigenvalue {value} below clamp tolerance {tol}")]
    NegativeEigenvalue { value: f64, tol: f64 },

    #[error("atom weights sum to {0}, expected 1")]
    UnnormalizedWeights(f64),

    #[error("negative atom location {0}")]
    NegativeLocation(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("window too long: 2k = {two_k} exceeds n = {n}")]
    WindowTooLong { two_k: usize, n: usize },

    #[error("degenerate return: pre-averaged column {index} has zero norm")]
    DegenerateReturn { index: usize },

    #[error("matrix not symmetric: max asymmetry {asym} exceeds {tol}")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("noise variance gap {gap} for asset {index} is negative")]
    NegativeVarianceGap { gap: f64, index: usize },

    #[error("solver did not converge after {iterations} iterations, best residual {residual}")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("outside contraction region: Im z = {im_z} below threshold {threshold}")]
    OutsideContractionRegion { im_z: f64, threshold: f64 },

    #[error("imaginary part {0} below trusted region (need Im z >= {1})")]
    BelowTrustedRegion(f64, f64),

    #[error("pivot limit {limit} exceeded, best objective {objective}")]
    PivotLimit {
        limit: usize,
        objective: f64,
        weights: Vec<f64>,
    },

    #[error("linear program infeasible")]
    Infeasible,

    #[error("linear program unbounded")]
    Unbounded,

    #[error("too few usable grid points: {usable} of {total} (need at least {needed})")]
    TooFewGridPoints {
        usable: usize,
        total: usize,
        needed: usize,
    },

    #[error("config error in field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
