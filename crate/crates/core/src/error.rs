use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical routines.
///
/// Estimator non-convergence is not an error: it is reported through
/// [`crate::Status`] so that Monte Carlo batches can count it.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the function.
    Domain(&'static str),
    /// Model parameters violate their invariants.
    InvalidParams(&'static str),
    /// The sample cannot support the requested computation (empty, all equal, ...).
    DegenerateSample(&'static str),
    /// Adaptive quadrature ran out of subdivisions with the error above ten times the tolerance.
    QuadratureNonConvergence { value: f64, abs_error: f64 },
    /// A continued fraction or series did not converge.
    NoConvergence(&'static str),
    /// Every replicate of a Monte Carlo cell was discarded.
    EmptyCell,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "domain error: {what}"),
            Error::InvalidParams(what) => write!(f, "invalid parameters: {what}"),
            Error::DegenerateSample(what) => write!(f, "degenerate sample: {what}"),
            Error::QuadratureNonConvergence { value, abs_error } => write!(
                f,
                "quadrature did not converge (value {value}, estimated error {abs_error})"
            ),
            Error::NoConvergence(what) => write!(f, "no convergence: {what}"),
            Error::EmptyCell => write!(f, "every replicate in the cell was discarded"),
        }
    }
}

impl core::error::Error for Error {}
