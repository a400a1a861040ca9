use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Inputs violate a precondition (parameter ranges, shapes, grid sizes).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bracketed root does not exist for the requested configuration,
    /// e.g. an asymmetric profile below the bifurcation frequency.
    #[error("no root: {0}")]
    NoRoot(String),

    /// An eigenvalue crossing could not be isolated by the scan.
    #[error("unresolved spectral count: {0}")]
    Unresolved(String),

    /// The Crank-Nicolson fixed point failed to converge even at the
    /// smallest admissible substep.
    #[error("fixed-point divergence at t = {t}")]
    FixedPointDivergence { t: f64 },

    /// A linear solve or factorization broke down.
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn no_root(msg: impl Into<String>) -> Self {
        Error::NoRoot(msg.into())
    }
}
