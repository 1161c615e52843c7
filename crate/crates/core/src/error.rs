use core::fmt;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the domain of a formula (for example `n < 1`).
    Domain(&'static str),
    /// Evaluation at or too close to a singular point of a map or kernel.
    Singularity(&'static str),
    /// A precondition of an operation was violated by the caller.
    Contract(&'static str),
    /// A mixture of points or data carrying different dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// Adaptive quadrature failed to reach its tolerance.
    Quadrature { estimate: f64, error: f64 },
    /// A field could not be evaluated at a stencil node.
    Evaluation(&'static str),
    /// Adaptive ODE integration could not make progress.
    Stiffness { t: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Singularity(m) => write!(f, "singular input: {m}"),
            Error::Contract(m) => write!(f, "contract violation: {m}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Quadrature { estimate, error } => write!(
                f,
                "quadrature did not converge (estimate {estimate:e}, error {error:e})"
            ),
            Error::Evaluation(m) => write!(f, "field evaluation failed: {m}"),
            Error::Stiffness { t } => write!(f, "step size underflow at t = {t}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
