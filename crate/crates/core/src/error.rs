use thiserror::Error;

/// Failures raised by the models, steppers and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("array length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("minimal depth violated at cell {cell}: h = {depth} < h_min = {h_min}")]
    MinimalDepthViolation { cell: usize, depth: f64, h_min: f64 },

    #[error("solid support of width {width} does not fit in a periodic box of length {length}")]
    SupportExceedsDomain { width: f64, length: f64 },

    #[error("asymptotic regime violated: eps = {eps} must not exceed mu = {mu}")]
    RegimeViolation { eps: f64, mu: f64 },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("non-finite value in {what}")]
    NonFiniteState { what: &'static str },

    #[error("smoothness lost: max gradient {gradient} exceeds limit {limit} at t = {time}")]
    SmoothnessLost { gradient: f64, limit: f64, time: f64 },

    #[error("Picard iteration is not contracting (ratio {ratio} at iteration {iteration})")]
    NoContraction { iteration: usize, ratio: f64 },

    #[error("Picard iteration did not reach tolerance after {iterations} iterations (last difference {last_diff})")]
    NotConverged { iterations: usize, last_diff: f64 },

    #[error("velocity bound violated at t = {time} (margin {margin})")]
    BoundViolated { time: f64, margin: f64 },

    #[error("need at least {required} samples, got {actual}")]
    InsufficientSamples { required: usize, actual: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
