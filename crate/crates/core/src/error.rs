use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("site {site} out of range for a {n_sites}-site network")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("{n_sites} sites exceeds the dense limit of {limit}")]
    ExceedsDenseLimit { n_sites: usize, limit: usize },

    #[error("matrix exponential overflow (1-norm {norm:e})")]
    ExpOverflow { norm: f64 },

    #[error("eigenphase {phase} lies within {tolerance:e} of the log branch cut")]
    BranchAmbiguity { phase: f64, tolerance: f64 },

    #[error("matrix is numerically defective: residual {residual:e}, eigenvector condition {condition:e}")]
    NearDefective { residual: f64, condition: f64 },

    #[error("eigendecomposition failed to converge")]
    EigenFailed,

    #[error("excitation-sector leakage {leakage:e} exceeds {tolerance:e}")]
    SectorLeakage { leakage: f64, tolerance: f64 },

    #[error("rotation error epsilon = {0} breaks the excitation-sector structure")]
    SectorsBroken(f64),

    #[error("invariant `{what}` violated at period {period}: {value:e}")]
    InvariantViolation { period: usize, what: &'static str, value: f64 },

    #[error("time step {dt} does not divide the drive segments")]
    StepDoesNotDivide { dt: f64 },

    #[error("time step {dt} too coarse: step-doubling error estimate {estimate:e} exceeds {tolerance:e}")]
    StepTooCoarse { dt: f64, estimate: f64, tolerance: f64 },

    #[error("invalid initial-state symbol {0:?} (expected '0', '1' or '+')")]
    InvalidSymbol(char),

    #[error("no crossing found in the scanned interval")]
    NoCrossing,
}
