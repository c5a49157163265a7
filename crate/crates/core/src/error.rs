use thiserror::Error;

/// Errors raised by the geometry toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("signature entries must be +1 or -1, found {0}")]
    InvalidSignature(i64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for a rank-{rank} tensor")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("extent mismatch: index {i} has extent {extent_i}, index {j} has extent {extent_j}")]
    ExtentMismatch {
        i: usize,
        j: usize,
        extent_i: usize,
        extent_j: usize,
    },

    #[error("indices {i} and {j} must pair one upper with one lower index")]
    VarianceMismatch { i: usize, j: usize },

    #[error("component count {got} does not match the product of extents {expected}")]
    ComponentCount { expected: usize, got: usize },

    #[error("metric is not symmetric (max asymmetry {asymmetry:e})")]
    AsymmetricMetric { asymmetry: f64 },

    #[error("degenerate metric: |det| = {det:e} at scale {scale:e}")]
    DegenerateMetric { det: f64, scale: f64 },

    #[error("signature mismatch at {point:?}: chart declares (p, q) = {expected:?}, metric has {found:?}")]
    SignatureMismatch {
        point: Vec<f64>,
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("point {point:?} lies outside the chart validity region")]
    OutsideValidity { point: Vec<f64> },

    #[error("chart provides no analytic {0}")]
    NoAnalyticForm(&'static str),

    #[error("tangent vector of norm {norm} exceeds the conjugate-point guard {guard}")]
    BeyondGuard { norm: f64, guard: f64 },

    #[error("logarithm map did not converge in {iterations} iterations (residual {residual:e}); point is outside the normal region")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("direction is null; the conformal factor is undefined")]
    NullDirection,

    #[error("the distinguished coordinate has no component along the direction; split is inapplicable")]
    InapplicableSplit,

    #[error("input violates the required symmetry by {violation:e}")]
    SymmetryViolation { violation: f64 },

    #[error("metrics are not conformally related on the patch (residual {residual:e})")]
    PatchMismatch { residual: f64 },

    #[error("stereographic transform is singular at {point:?}")]
    StereographicPole { point: Vec<f64> },

    #[error("insufficient sampling: {equations} equations for {unknowns} unknowns")]
    InsufficientSampling { equations: usize, unknowns: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
