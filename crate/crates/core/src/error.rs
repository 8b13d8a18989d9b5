use thiserror::Error;

/// Errors raised by the numerical models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NonHermitianInput(f64),

    #[error("Hermitian eigensolver did not converge")]
    DecompositionFailure,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} exceeds configured maximum {1}")]
    DimensionTooLarge(usize, usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("basis is not orthonormal (max deviation {0:.3e})")]
    NonOrthonormalBasis(f64),

    #[error("environment dimension {env} too small for system dimension {system}")]
    EnvironmentTooSmall { system: usize, env: usize },

    #[error("density matrix is not diagonal (max off-diagonal {0:.3e})")]
    NotDiagonal(f64),

    #[error("apparatus profile is not normalized: {0}")]
    UnnormalizedProfile(String),

    #[error("fit window has {0} samples, need at least {1}")]
    WindowTooShort(usize, usize),

    #[error("coupling gamma is zero; use the golden-rule rate instead")]
    ZeroGamma,

    #[error("invalid rate matrix: {0}")]
    InvalidRateMatrix(String),

    #[error("integration became unstable at t = {0}")]
    UnstableStep(f64),

    #[error("density matrix lost Hermiticity (asymmetry {0:.3e})")]
    NonHermitianDrift(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
