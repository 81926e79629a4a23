use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {name} = {value} is not unimodular (|{name}| = {modulus})")]
    NotUnimodular {
        name: &'static str,
        value: Complex64,
        modulus: f64,
    },

    #[error("lambda = {0} is within the exclusion radius of -1 or 1")]
    ExcludedLambda(Complex64),

    #[error("Blaschke zero {0} lies outside the allowed radius 0.95")]
    ZeroOutsideRadius(Complex64),

    #[error("Blaschke scale {0} has modulus greater than one")]
    ScaleTooLarge(Complex64),

    #[error("monomial degree must be at least one")]
    ZeroDegree,

    #[error("point {0} is outside the open unit disk")]
    OutsideDisk(Complex64),

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e}) on [{z0}, {z1}]")]
    ToleranceNotMet {
        z0: Complex64,
        z1: Complex64,
        tol: f64,
        estimate: f64,
    },

    #[error("invalid quadrature configuration: {0}")]
    InvalidQuadrature(&'static str),

    #[error("radius {0} is not in (0, 1)")]
    InvalidRadius(f64),

    #[error("sample count {got} is below the minimum {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("derivative vanishes at {0}")]
    VanishingDerivative(Complex64),

    #[error("point {0} is within 1e-9 of the curve")]
    TooCloseToCurve(Complex64),

    #[error("map is not orientation preserving at the origin (|a| = {0})")]
    NotOrientationPreserving(f64),

    #[error("shear system dilatation is not a Schwarz function at {0}")]
    NotSchwarz(Complex64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl Error {
    pub fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
