use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive and match the entry count ({rows}x{cols}, {len} entries)")]
    BadShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("{routine} did not converge within {sweeps} sweeps")]
    NoConvergence {
        routine: &'static str,
        sweeps: usize,
    },

    #[error("invalid Schatten exponent {0}")]
    InvalidExponent(f64),

    #[error("function has Lipschitz bound {0} > 1; rescale first")]
    LipschitzTooLarge(f64),

    #[error("function must be nondecreasing")]
    NotMonotone,

    #[error("function must be strictly increasing")]
    NotStrictlyIncreasing,

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid function descriptor: {0}")]
    InvalidDescriptor(&'static str),

    #[error("sequence must be strictly ascending (position {index})")]
    NotAscending { index: usize },

    #[error("degenerate spectrum: gap {gap:e} below tolerance {tolerance:e} at position {index}")]
    DegenerateSpectrum {
        index: usize,
        gap: f64,
        tolerance: f64,
    },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("expected a positive value, got {0}")]
    NotPositive(f64),

    #[error("invalid kernel parameters: {0}")]
    InvalidKernelParams(&'static str),

    #[error("log ratio {log_ratio} outside the kernel range [0, {x_extent}]")]
    RatioOutOfRange { log_ratio: f64, x_extent: f64 },

    #[error("kernel grid too coarse: representation residual {residual:e} exceeds {threshold:e}")]
    KernelTooCoarse { residual: f64, threshold: f64 },

    #[error("invalid estimator configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("not a rational number")]
    NotRational,

    #[error("at least one trial is required")]
    NoTrials,
}
