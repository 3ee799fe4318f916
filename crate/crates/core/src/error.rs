//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter fails its documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation point lies outside a profile's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A construction has no solution for the given data.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Too few samples to perform a fit or a check.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The input does not belong to the class the operation handles.
    #[error("wrong class: {0}")]
    WrongClass(String),

    /// An iterative solver failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// A barrier ladder search exhausted its budget; the payload reports
    /// the least-bad candidate and where its worst violation sits.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    /// Tail extrapolation impossible: the fitted decay rate is not positive.
    #[error("cannot extrapolate: {0}")]
    CannotExtrapolate(String),

    /// A stated hypothesis fails on the supplied data.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// Malformed structured input (expression source or JSON document).
    #[error("parse error: {0}")]
    Parse(String),
}
