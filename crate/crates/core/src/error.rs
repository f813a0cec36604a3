use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size must be even and positive, got {0}")]
    OddGrid(usize),

    #[error("grid size mismatch: {left} vs {right}")]
    GridMismatch { left: usize, right: usize },

    #[error("expected {expected} samples for an {m}x{m} grid, got {got}")]
    SampleCount { m: usize, expected: usize, got: usize },

    #[error("wavevector ({n1}, {n2}) is outside the {m}x{m} grid truncation")]
    OutOfGrid { n1: i64, n2: i64, m: usize },

    #[error("the zero wavevector carries the mean and is not allowed here")]
    ZeroMode,

    #[error("L^p exponent must be >= 1 or infinite, got {0}")]
    InvalidExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("CFL violation at t = {t}: dt = {dt} exceeds the advective limit {limit}")]
    CflViolation { t: f64, dt: f64, limit: f64 },

    #[error("blow-up guard fired at t = {t} (step {step}): max |coefficient| = {max_abs}")]
    BlowUp { t: f64, step: u64, max_abs: f64 },

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("support-wrap guard: rescaled support radius {radius} is not below pi")]
    SupportWrap { radius: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors raised by the numerics (CFL, blow-up) rather than by bad input.
    pub fn is_numerical_abort(&self) -> bool {
        matches!(self, Error::CflViolation { .. } | Error::BlowUp { .. })
    }
}
