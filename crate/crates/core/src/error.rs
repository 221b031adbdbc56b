use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// `Divergence` means an integral that a quantity depends on does not
/// exist (or blows up numerically); `NonConvergence` means the resource
/// budget ran out before the requested tolerance was met.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "no convergence after {subdivisions} subdivisions (error estimate {error_estimate:e})"
    )]
    NonConvergence {
        subdivisions: usize,
        error_estimate: f64,
    },

    #[error("integral diverges near {location}: {detail}")]
    Divergence { location: f64, detail: String },

    #[error("argument outside its domain: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable class name used in machine-readable error reports.
    pub fn class(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::Divergence { .. } => "Divergence",
            Error::Domain(_) => "DomainError",
            Error::InsufficientData(_) => "InsufficientData",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    pub(crate) fn divergence(location: f64, detail: impl Into<String>) -> Self {
        Error::Divergence {
            location,
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
