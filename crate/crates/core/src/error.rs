use thiserror::Error;

use crate::hilbert::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty state vector")]
    EmptyState,

    #[error("tensor dimension {0} exceeds the configured cap of {1}")]
    DimensionOverflow(u128, usize),

    #[error("state is not normalized: |<v|v> - 1| = {0:e}")]
    NotNormalized(f64),

    #[error("non-finite amplitude or matrix entry")]
    NonFinite,

    #[error("invalid projective measurement: {0}")]
    InvalidMeasurement(ValidationReport),

    #[error("measurements are not compatible: commutator norm {norm:e} for outcomes ({left}, {right})")]
    Incompatible { left: String, right: String, norm: f64 },

    #[error("outcome labels differ between distributions")]
    LabelMismatch,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("states are not orthogonal: |<psi1|psi2>| = {0:e}")]
    NonOrthogonal(f64),

    #[error("superposition coefficients not normalized: |c1|^2 + |c2|^2 = {0}")]
    BadCoefficients(f64),

    #[error("internal cross-check failed for outcome {label}: {lhs} vs {rhs}")]
    CrossCheck { label: String, lhs: f64, rhs: f64 },

    #[error("empty phase grid")]
    EmptyGrid,

    #[error("Fock shift overflow: amplitude {0:e} at the top level n = N-1 would be lost; increase the truncation")]
    FockOverflow(f64),

    #[error("truncation too small: tail mass {0:e} beyond the truncated space")]
    TruncationTooSmall(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
