//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::Int;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Dimension or shape of an input does not match the operation.
    #[error("shape error: {0}")]
    Shape(String),

    /// An exact integer inverse was requested for a matrix with |det| != 1.
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(Int),

    /// Two values belong to different lattices.
    #[error("lattice mismatch: operands live in different lattices")]
    LatticeMismatch,

    /// A reflection was requested in a vector of norm other than +/-2.
    #[error("not a reflection vector: norm {0}, expected +2 or -2")]
    NotReflectionVector(Int),

    /// The rows of a candidate plane basis are linearly dependent.
    #[error("degenerate basis: rows do not span a 3-dimensional space")]
    DegenerateBasis,

    /// The form restricted to a candidate plane is not positive definite.
    #[error("not positive: the restricted form is not positive definite")]
    NotPositive,

    /// A definite quadratic form was required (enumeration, reduction).
    #[error("not definite: {0}")]
    NotDefinite(String),

    /// An operation required exact rational data and received something else.
    #[error("exactness error: {0}")]
    Exactness(String),

    /// A precondition on an argument value failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The root graph is not a disjoint union of ADE diagrams.
    #[error("classification error: {0}")]
    Classification(String),

    /// A root list contained a vector that is not a valid reflection vector.
    #[error("invalid root at index {index}: norm {norm}")]
    InvalidRoot { index: usize, norm: Int },

    /// A fixed-plane certificate failed its residual tolerance.
    #[error("certificate residual {residual:e} exceeds tolerance at index {index}")]
    CertificateResidual { index: usize, residual: f64 },

    /// Malformed JSON input.
    #[error("json error: {0}")]
    Json(String),

    /// An internal consistency check failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error object.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Shape(_) => "shape",
            Error::NotUnimodular(_) => "not_unimodular",
            Error::LatticeMismatch => "lattice_mismatch",
            Error::NotReflectionVector(_) => "not_reflection_vector",
            Error::DegenerateBasis => "degenerate_basis",
            Error::NotPositive => "not_positive",
            Error::NotDefinite(_) => "not_definite",
            Error::Exactness(_) => "exactness",
            Error::Precondition(_) => "precondition",
            Error::Classification(_) => "classification",
            Error::InvalidRoot { .. } => "invalid_root",
            Error::CertificateResidual { .. } => "certificate_residual",
            Error::Json(_) => "json",
            Error::Internal(_) => "internal",
        }
    }
}
