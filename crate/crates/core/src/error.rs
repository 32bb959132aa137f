use thiserror::Error;

use crate::analysis::InvertibilityReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("period matrix is singular")]
    SingularMatrix,

    #[error("period matrix is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("undersampled period cell: {samples} samples per axis cannot resolve truncation {truncation} (need at least {})", 2 * truncation + 2)]
    Undersampled { samples: usize, truncation: usize },

    #[error("modulation frequency {frequency:.6} exceeds the aliasing limit {limit:.6}")]
    Aliasing { frequency: f64, limit: f64 },

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate:.17e})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("quadrature did not reach tolerance (error estimate {error_estimate:.3e})")]
    Quadrature { error_estimate: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invertibility criterion not met (inconclusive): |c0| = {:.6e}, tail = {:.6e}, threshold = {:.6e}", .0.c0.norm(), .0.tail, .0.threshold)]
    NotInvertible(Box<InvertibilityReport>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
