use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("singular coefficient matrix {what} (reciprocal condition number {rcond:.3e})")]
    SingularCoefficient { what: &'static str, rcond: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {message} (residuals {residuals:?})")]
    NumericalFailure { message: String, residuals: Vec<f64> },

    #[error("step size underflow at xi = {xi} (possible stiffness)")]
    Stiffness { xi: f64 },

    #[error("function vanishes on or near the contour boundary (|f| = {modulus:.3e} at {at})")]
    ZeroOnBoundary { at: Complex64, modulus: f64 },

    #[error("cannot isolate {lambda} from neighbouring roots (nearest at distance {distance:.3e})")]
    Isolation { lambda: Complex64, distance: f64 },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("continuation broke after mu = {last_mu}: {reason}")]
    ContinuationBreak { last_mu: f64, reason: String },

    #[error("orbit did not return to its section within xi = {cutoff}")]
    NonPeriodic { cutoff: f64 },

    #[error("Floquet multiplier magnitude {modulus:.3e} underflows")]
    Underflow { modulus: f64 },
}

impl Error {
    /// Process exit status used by the command-line front end:
    /// 1 for domain/precondition problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SingularCoefficient { .. } | Error::Domain(_) | Error::Precondition(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
