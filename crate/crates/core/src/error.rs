use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("axis {axis} out of range for a {dims}-dimensional grid")]
    AxisOutOfRange { axis: usize, dims: usize },

    #[error("unsupported derivative order {0} (expected 1, 2 or 3)")]
    UnsupportedOrder(u8),

    #[error("non-finite value in field")]
    NonFinite,

    /// The solver produced a value above the magnitude cap or a NaN/Inf.
    #[error("solver blew up at step {step}: max |u| = {value:e}")]
    BlowUp { step: usize, value: f64 },

    #[error("need at least {required} base pairs, got {got}")]
    InsufficientBase { required: usize, got: usize },

    #[error("dataset format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("dataset truncated at byte {offset}: {message}")]
    Truncated { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::ShapeMismatch(msg.into())
    }

    /// True for numerical failures (solver blow-up, non-finite output).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::BlowUp { .. } | Error::NonFinite)
    }
}
