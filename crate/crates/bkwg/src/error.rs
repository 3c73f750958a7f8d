use thiserror::Error;

/// Errors raised by evaluation, series and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method hit its iteration cap.
    #[error("no convergence after {iterations} iterations in {routine}")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },
    /// A binomial expansion needs integer shape parameters.
    #[error("expansion unavailable: {0}")]
    UnsupportedExpansion(String),
    /// The requested integral does not exist or the quadrature could not settle.
    #[error("integral did not converge: {0}")]
    NonConvergentIntegral(String),
    /// A truncated series failed to contract.
    #[error("series diverges: {0}")]
    Divergent(String),
    /// A matrix could not be inverted.
    #[error("matrix is singular")]
    SingularMatrix,
    /// A dataset violates its invariants.
    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
