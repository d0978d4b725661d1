use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected ambient dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not on the unit sphere (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("quadrature did not converge: achieved error estimate {achieved:e} > {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("approximating family too large ({net} points); use a larger epsilon")]
    FamilyTooLarge { net: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
