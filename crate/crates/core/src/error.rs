use thiserror::Error;

use crate::model::Parity;

/// Errors raised by the solver stack.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of a kernel (index too large, non-finite input).
    #[error("domain error: {0}")]
    Domain(String),

    /// Model or run parameters violate their invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The dense eigensolver did not converge.
    #[error("eigensolver did not converge for the {sector:?} sector (matrix size {size})")]
    NoConvergence { sector: Option<Parity>, size: usize },

    /// A basis or Fock cutoff is too small to represent the requested state.
    #[error("truncation: {what} reached {achieved}, need {required}; {advice}")]
    Truncation {
        what: String,
        achieved: f64,
        required: f64,
        advice: String,
    },

    /// A computed quantity broke a conservation law it must obey.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
