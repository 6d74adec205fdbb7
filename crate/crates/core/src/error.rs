use thiserror::Error;

/// Errors raised by every layer of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or non-finite input, dimension mismatch.
    #[error("invalid input: {0}")]
    Input(String),

    /// Parameter record violates its invariants (e.g. `lambda > Lambda`, `b <= -1`).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Argument outside the domain of a function (e.g. `x_norm > R`, `sigma <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// Geometric configuration is inconsistent or unsupported.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// Nearest boundary point is not unique.
    #[error("multi-contact: {0}")]
    MultiContact(String),

    /// Principal curvature violates `kappa < 1/R` at the contact point.
    #[error("curvature condition violated: kappa = {kappa}, 1/R = {inv_radius}")]
    CurvatureCondition { kappa: f64, inv_radius: f64 },

    /// Solver/grid configuration problem (stencil leaves the box, CFL, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative solver stopped before reaching its tolerance.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Rate fitting or extrapolation could not be carried out.
    #[error("fit error: {0}")]
    Fit(String),

    #[error("io error: {0}")]
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

pub type Result<T> = std::result::Result<T, Error>;
