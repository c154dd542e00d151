use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain an operation is defined on.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// The Greitzer model was evaluated at a non-positive plenum pressure.
    #[error("model breakdown: plenum pressure psi = {psi} is not positive")]
    ModelBreakdown { psi: f64 },

    /// The equilibrium condition has no root inside the operating range.
    #[error("no equilibrium for throttle parameter g = {g}")]
    NoEquilibrium { g: f64 },

    /// A stability computation could not be carried out (e.g. no sign change).
    #[error("analysis error: {0}")]
    Analysis(String),

    /// Integration produced a non-finite value or hit a model breakdown.
    #[error("diverged at t = {t} after {steps} steps: {reason}")]
    Diverged {
        t: f64,
        steps: usize,
        state: Vec<f64>,
        reason: String,
    },

    /// A step response is too flat to extract dead time and time constant.
    #[error("degenerate step response: {0}")]
    DegenerateResponse(&'static str),

    /// Scenario file syntax error.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A configuration value failed validation.
    #[error("invalid value for `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
