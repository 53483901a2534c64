use thiserror::Error;

use crate::complexes::Cpx;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Request would exceed a fixed computational cap.
    #[error("resource limit: {what} = {value} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    /// An iterate hit zero, so the next step divides by zero.
    #[error("division by zero at step {step}")]
    DivisionByZero { step: usize },

    #[error("root finder did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize, best: Vec<Cpx> },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
