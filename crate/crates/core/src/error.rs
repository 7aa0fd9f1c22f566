use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {m} must be even and at least 2")]
    InvalidGrid { m: usize },

    #[error("grid of {m} points cannot resolve cosine degree {degree} (need m >= {required})")]
    Resolution {
        m: usize,
        degree: usize,
        required: usize,
    },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("horizon must be non-negative, got {0}")]
    NegativeHorizon(f64),

    #[error("momentum has phi_0 = {0}; zeta is not periodic")]
    NonPeriodicMomentum(f64),

    #[error("zeta vanishes identically; the steepest-descent state is undefined")]
    DegenerateMomentum,

    #[error("time {t} lies beyond the computed horizon {horizon}")]
    BeyondHorizon { t: f64, horizon: f64 },

    #[error("invalid control: {0}")]
    InvalidControl(String),

    #[error("control covers [0, {end}] but the horizon is {horizon}")]
    ControlTooShort { end: f64, horizon: f64 },

    #[error("invalid oracle parameter: {0}")]
    InvalidOracleParameter(String),

    #[error("modal integration blew up at t = {t} (step {step})")]
    BlowUp { t: f64, step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
