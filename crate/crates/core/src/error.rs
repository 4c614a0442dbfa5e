use std::fmt;

use thiserror::Error;

/// Why the real-distinct spectral path cannot handle a matrix.
///
/// Every variant means the same thing to callers: fall back to the
/// eigenvalue-agnostic engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralReason {
    Complex,
    Repeated,
    NonPositive,
    /// The eigenvector basis failed the reconstruction check.
    IllConditioned,
}

impl fmt::Display for SpectralReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpectralReason::Complex => "complex eigenvalue",
            SpectralReason::Repeated => "repeated or clustered eigenvalues",
            SpectralReason::NonPositive => "non-positive real eigenvalue",
            SpectralReason::IllConditioned => "eigenvector basis too ill-conditioned",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular to working precision (det = {det:e})")]
    Singular { det: f64 },

    #[error("spectral method unsupported: {0}")]
    SpectralUnsupported(SpectralReason),

    #[error("horizon must be at least 1")]
    EmptyHorizon,

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "infinite-time controllable region is unbounded: eigenvalue {lambda} has modulus <= 1"
    )]
    DivergentRegion { lambda: f64 },

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("{method} method: {source}")]
    Engine {
        method: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_method(self, method: &'static str) -> Error {
        match self {
            e @ Error::Engine { .. } => e,
            e => Error::Engine {
                method,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with any method context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Engine { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
