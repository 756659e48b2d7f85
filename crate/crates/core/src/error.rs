use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical input violates its domain (sign, finiteness, guard).
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("momentum ladder underflow at n = {index}: p0² + 2m·n·ħω = {radicand} ≤ 0")]
    LadderUnderflow { index: i32, radicand: f64 },

    #[error("no resonance on branch {branch}: {reason}")]
    NoResonance { branch: i32, reason: &'static str },

    #[error("classical turning point: p_n² − 2mV0·cos(qy) = {radicand} ≤ 0 at y = {position} m")]
    TurningPoint { position: f64, radicand: f64 },

    #[error("step size underflow at ŷ = {position} (h = {step})")]
    StepSizeUnderflow { position: f64, step: f64 },

    #[error("step budget exhausted at ŷ = {position} after {steps} steps")]
    StepBudgetExhausted { position: f64, steps: usize },

    #[error("non-finite value encountered at ŷ = {position}")]
    NonFinite { position: f64 },

    #[error("quadrature did not converge: error {error_estimate:e} after {intervals} intervals")]
    QuadratureNonConvergence {
        error_estimate: f64,
        intervals: usize,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
