use thiserror::Error;

/// Errors raised by the solver. Shape mismatches and non-finite inputs to the
/// low-level kernels are contract violations and panic instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    /// The magnetic rotation angle `t * B(x1)` reached pi somewhere; the step
    /// has to shrink.
    #[error("rotation angle {max_angle:.6} reaches pi; reduce the time step")]
    RotationAngleTooLarge { max_angle: f64 },

    /// Poisson's equation on the torus needs a zero-mean source.
    #[error("charge density has nonzero mean {mean:e}; Poisson problem is not solvable")]
    SolvabilityViolation { mean: f64 },

    #[error("rate fit: {0}")]
    FitDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite value detected in state at t = {time}")]
    NonFinite { time: f64 },

    #[error("observer aborted the run: {0}")]
    Observer(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
