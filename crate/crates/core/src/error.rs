use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HmapError {
    #[error("point {0} lies outside the open unit disk")]
    Domain(Complex64),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("derivative of order {order} not available (max {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("derivative vanishes at {0}")]
    DegenerateDerivative(Complex64),

    #[error("map is constant")]
    DegenerateMap,

    #[error("1 - omega vanishes (or |omega| >= 1) near {0}")]
    DegenerateDilatation(Complex64),

    #[error("affine denominator 1 + mu*g'(0) vanishes")]
    SingularAffine,

    #[error("map is not sense-preserving at {0}")]
    NotSensePreserving(Complex64),

    #[error("reference map is not convex near {0}")]
    NotConvex(Complex64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("map is not normalized: {0}")]
    NotNormalized(String),

    #[error("map has a non-zero co-analytic part")]
    NotAnalytic,

    #[error("image points of {0} and {1} coincide")]
    InjectivityFailure(Complex64, Complex64),

    #[error("mesh vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),

    #[error("argument of f'/phi' wraps past pi near {0}")]
    ArgWrap(Complex64),

    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("map description: {0}")]
    Description(String),
}

pub type Result<T, E = HmapError> = std::result::Result<T, E>;
