use thiserror::Error;

use crate::invariants::InvariantSystem;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Jacobian at {0:?}")]
    SingularJacobian([f64; 3]),

    #[error("invariant triple is in system {found:?}, expected {expected:?}")]
    SystemMismatch {
        expected: InvariantSystem,
        found: InvariantSystem,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("modulus `{name}` is not positive at lambda = {at} (value {value})")]
    NonPositiveModulus { name: String, at: f64, value: f64 },

    #[error("finite-difference and closed-form routes disagree by {0:e}")]
    RouteMismatch(f64),

    #[error("pre-averaging symmetry violation {0:e} exceeds tolerance")]
    AsymmetryTooLarge(f64),

    #[error("plane waves do not share a propagation direction")]
    DirectionMismatch,

    #[error("evaluation point at the origin (r = 0)")]
    SingularPoint,

    #[error("operation needs time derivatives beyond those stored: {0}")]
    NeedsTimeDerivative(String),

    #[error("non-finite values after step at t = {0}")]
    NonFinite(f64),

    #[error("characteristics remain bounded up to t = {0}")]
    NoBlowup(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
