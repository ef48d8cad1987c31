use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("state length mismatch: expected {expected} shells, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shell index {index} out of range 0..={max}")]
    ShellIndexOutOfRange { index: usize, max: usize },

    #[error("stability constants need lambda^(3/8) < 2, got lambda = 2^{lambda_exp}")]
    InvalidLambda { lambda_exp: f64 },

    #[error("step size underflow at t = {t}: dt = {dt:e} below dt_min")]
    StepSizeUnderflow { t: f64, dt: f64 },

    #[error("maximum number of steps ({max_steps}) exceeded at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    #[error("non-finite state at t = {t}; parameters exceed the representable range")]
    NonFiniteState { t: f64 },

    #[error("invalid integration input: {0}")]
    InvalidInput(String),

    #[error("time {t} is not resolvable on the sample grid")]
    SampleMiss { t: f64 },

    #[error("deviation below resolution floor on window [{t1}, {t2}]: already converged")]
    DegenerateWindow { t1: f64, t2: f64 },

    #[error("fit range [{j_min}, {j_max}] too small or outside admissible shells (need >= 4 shells inside [1, {max}])")]
    RangeTooSmall { j_min: usize, j_max: usize, max: usize },

    #[error("window [{t1}, {t2}] holds fewer than two samples")]
    EmptyWindow { t1: f64, t2: f64 },
}
