use thiserror::Error;

use crate::algebra::Regime;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("spectrum of the dynamical matrix is not real and simple (regime {0:?})")]
    Regime(Regime),

    #[error("symplectic pairing failed: |v^T Ω w| = {value:e} is below tolerance {tol:e}")]
    Pairing { value: f64, tol: f64 },

    #[error("symplectic eigenbasis violates an invariant: {what} residual {residual:e} > {tol:e}")]
    Invariant {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("truncation error: {what} residual {residual:e} exceeds {tol:e}; increase n_max")]
    Truncation {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("index {index} out of range (limit {limit})")]
    Range { index: usize, limit: usize },

    #[error("biorthogonal family is degenerate (Gram matrix not invertible)")]
    DegenerateFamily,

    #[error("state lies outside the span of the eigenfamily (reconstruction residual {residual:e} > {tol:e})")]
    OutsideSpan { residual: f64, tol: f64 },

    #[error("partition function diverges: mode {mode} has beta*lambda - zeta = {exponent} <= 0")]
    Divergence { mode: usize, exponent: f64 },

    #[error("numerical routine failed to converge: {0}")]
    NoConvergence(&'static str),
}
