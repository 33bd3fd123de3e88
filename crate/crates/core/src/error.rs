use thiserror::Error;

use crate::solver::CflReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("unstable explicit scheme: {0}")]
    Unstable(CflReport),

    #[error("non-finite value at step {step}, node {node}")]
    NonFinite { step: usize, node: usize },

    #[error("adaptive quadrature did not converge on [{lo}, {hi}] (estimated error {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    #[error("derivative of order {order} is not available for {what}")]
    MissingDerivative { order: usize, what: &'static str },

    #[error("meshes do not nest: {0}")]
    NonNesting(String),

    #[error("rate fit: {0}")]
    Fit(String),
}
