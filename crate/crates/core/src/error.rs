use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PhaseSpaceError {
    #[error("zero-length spin: chart is singular")]
    Singular,
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid system: {0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("exact solver cannot handle this system: {0}")]
    Unsupported(String),
    #[error("dimension cap exceeded: {0}")]
    TooLarge(String),
    #[error("ODE integration failed at t = {t}: step size underflow")]
    StepUnderflow { t: f64 },
}

#[derive(Debug, Error)]
pub enum TwaError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{failed} of {total} trajectories failed (limit 1%)")]
    Abort { failed: usize, total: usize },
    #[error("empty trajectory batch")]
    Empty,
}
