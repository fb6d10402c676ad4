//! Error type shared by every module of the library.

use thiserror::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// E' = E - 2 Z1 Z2 / R is not negative, so no decaying solution exists.
    #[error("unbound channel: E' = {e_prime} is not negative")]
    UnboundChannel { e_prime: f64 },

    /// A parameter or argument lies outside the domain where the ansatz is defined.
    #[error("parameter domain: {0}")]
    ParameterDomain(String),

    #[error("quadrature rule needs at least {min} nodes, got {requested}")]
    TooFewNodes { requested: usize, min: usize },

    /// A computed norm or weight sum came out non-positive.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Doubling the node count changed the result by more than the plateau tolerance.
    #[error("quadrature plateau not reached: coarse {coarse}, fine {fine}")]
    QuadratureNotConverged { coarse: f64, fine: f64 },

    #[error("no sign change in [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NotConverged { what: String, iterations: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The final state is not above the initial state.
    #[error("energy ordering: E_f = {e_final} is not above E_i = {e_initial}")]
    Ordering { e_initial: f64, e_final: f64 },

    #[error("invalid state label: {0}")]
    InvalidLabel(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit status for a command that stopped on this error.
    ///
    /// Bad input maps to 2, numerical trouble to 3 and file-system or
    /// serialization problems to 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnboundChannel { .. }
            | Error::ParameterDomain(_)
            | Error::TooFewNodes { .. }
            | Error::Unsupported(_)
            | Error::Ordering { .. }
            | Error::InvalidLabel(_) => 2,
            Error::QuadratureFailure(_)
            | Error::QuadratureNotConverged { .. }
            | Error::NoSignChange { .. }
            | Error::NotConverged { .. } => 3,
            Error::Io(_) => 4,
        }
    }
}
