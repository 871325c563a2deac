use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not skew-symmetric (residual {0:.3e})")]
    NotSkew(f64),
    #[error("matrix is not symmetric (residual {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("point ({0}, {1}) lies outside the parameter domain or its finite-difference margin")]
    OutOfDomain(f64, f64),
    #[error("not a proper rotation (residual {0:.3e})")]
    NotRotation(f64),
    #[error("polar decomposition failed: {0}")]
    PolarFailure(String),
    #[error("invalid material parameters: {0}")]
    InvalidMaterial(String),
    #[error("invalid quadrature order {0} (supported: 1..=12)")]
    QuadratureOrderInvalid(usize),
    #[error("no convergence after {iterations} iterations (gradient norm {grad_norm:.3e})")]
    NonConvergence { iterations: usize, grad_norm: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unknown catalog id: {0}")]
    UnknownCatalogId(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("incompatible scenario: {0}")]
    IncompatibleScenario(String),
}

pub type Result<T> = std::result::Result<T, Error>;
