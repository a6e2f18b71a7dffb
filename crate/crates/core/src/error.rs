use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller broke a precondition (shape, dimension, symmetry).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Eigenvalue or pivot at or below the singularity threshold.
    #[error("singular matrix: offending value {value:e} is at or below threshold {threshold:e}")]
    Singular { value: f64, threshold: f64 },

    /// The Hamiltonian model produced an invalid matrix at some time.
    #[error("model error at t = {time}: {reason}")]
    Model { time: f64, reason: String },

    /// Restarts were requested more often than once per four steps.
    #[error(
        "riccati integration is stiff at t = {time} (level N = {level}): \
         restart requested after only {steps_since_restart} steps; \
         the trajectory passes too near the coordinate singularity"
    )]
    Stiffness { time: f64, level: usize, steps_since_restart: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
