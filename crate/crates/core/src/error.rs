use thiserror::Error;

/// Errors raised by the physics kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("interaction exponent N = {0} admits no sound waves (N must exceed 1)")]
    NoSound(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("pole of the gamma function at x = {0}")]
    GammaPole(f64),

    #[error("argument x = {0} outside the domain x > 0")]
    NonPositiveArgument(f64),

    #[error("conformal factor undefined in one dimension unless c_N/g_N is constant (N = 3)")]
    ConformalFactorUndefined,

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("exceeded {0} integration steps")]
    TooManySteps(usize),

    #[error("time {t} outside the sampled range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("trajectory has not reached its linear asymptote: {0}")]
    NotConverged(String),

    #[error(
        "mode is not deep inside the horizon at t_start: ω_ad = {omega_ad}, required ≥ {required}"
    )]
    ModeAlreadyFrozen { omega_ad: f64, required: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
