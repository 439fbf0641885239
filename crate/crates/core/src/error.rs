use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrafError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("frame index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid signature ({p},{q}): {reason}")]
    InvalidSignature { p: usize, q: usize, reason: String },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("expected a homogeneous form, found grades {0:?}")]
    NonHomogeneous(Vec<usize>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("representation construction failed: {0}")]
    Representation(String),

    #[error("structure construction failed: {0}")]
    Structure(String),

    #[error("no admissible pairing: {0}")]
    NoPairing(String),

    #[error("case mismatch: {0}")]
    CaseMismatch(String),

    #[error("spinor is not in the Majorana subspace (D(alpha) != alpha)")]
    NotMajorana,

    #[error("covariants violate the Fierz constraints; not a spinor: {0}")]
    NotASpinor(String),

    #[error("covariants violate the truncated master identity; not a pinor: {0}")]
    NotAPinor(String),

    #[error("unsupported signature ({p},{q}) for {what}")]
    UnsupportedSignature { p: usize, q: usize, what: String },
}

pub type Result<T> = std::result::Result<T, GrafError>;
