use thiserror::Error;

/// Errors raised by the curvature engine and the identity checks built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {point:?} lies outside the sampling region of the chart")]
    PointOutOfDomain { point: Vec<f64> },

    #[error("metric is not positive definite at {point:?}")]
    SingularMetric { point: Vec<f64> },

    #[error("finite-difference stencil leaves the domain along coordinate {coord} at {point:?}")]
    StencilOutOfDomain { coord: usize, point: Vec<f64> },

    #[error("vectors span a degenerate plane (|u ^ v|^2 = {denominator:e})")]
    DegeneratePlane { denominator: f64 },

    #[error("operation requires n >= {min} (got n = {n})")]
    DimensionUnsupported { n: usize, min: usize },

    #[error("{identity} applied outside its hypothesis: {detail}")]
    HypothesisViolated { identity: &'static str, detail: String },

    #[error("scalar curvature varies by {spread:e} over the grid (limit {limit:e})")]
    NonConstantScalarCurvature { spread: f64, limit: f64 },

    #[error("eigenbasis cannot be g-orthonormalised (defect {defect:e})")]
    DegenerateEigenbasis { defect: f64 },

    #[error("mass m = {m} is inadmissible for n = {n}; admissible interval is (0, {bound})")]
    InadmissibleMass { n: usize, m: f64, bound: f64 },

    #[error("dimension n = {n} is not supported for {space} (supported: {supported})")]
    UnsupportedDimension { n: usize, space: String, supported: String },

    #[error("warping function must be positive (got {value} at t = {t})")]
    NonpositiveWarp { t: f64, value: f64 },

    #[error("chart of space `{0}` is not a warped product over a round sphere")]
    NotWarpedProduct(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("declared constant `{what}` not reproduced: expected {expected}, computed {computed}")]
    DeclaredMismatch { what: String, expected: f64, computed: f64 },

    #[error("multi-index of order {0} exceeds the supported maximum of 4")]
    DerivativeOrder(usize),

    #[error("tensor violates declared symmetry {symmetry} by {defect:e}")]
    SymmetryViolation { symmetry: String, defect: f64 },
}

pub type Result<T> = std::result::Result<T, GeometryError>;
