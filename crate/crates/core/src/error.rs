use thiserror::Error;

use crate::dynamics::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value at grid index {index}: {value}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("quadrature routes disagree: {first} vs {second} (tolerance {tolerance:e})")]
    CrossCheck {
        first: f64,
        second: f64,
        tolerance: f64,
    },

    #[error("no valid continuation: {0}")]
    Construction(String),

    #[error("time step underflow at t = {t}: dt = {dt:e} < dt_min")]
    DtUnderflow {
        t: f64,
        dt: f64,
        trajectory: Box<Trajectory>,
    },

    #[error("non-finite state after step at t = {t}")]
    Blowup { t: f64 },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
