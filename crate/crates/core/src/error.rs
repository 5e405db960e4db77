/// Error type shared by every module of the toolkit.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A physical quantity is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller-supplied parameter violates an operation precondition.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The integration step is too coarse for the fastest time scale.
    #[error("step-size error: {0}")]
    StepSize(String),

    /// An iterative fit failed to converge within its iteration budget.
    #[error("fit error: {0}")]
    Fit(String),

    /// Amplitude reached the top of the truncated Fock space.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// A linearized configuration violates its stability criteria.
    #[error("instability error: {0}")]
    Instability(String),

    /// An approximation is evaluated outside its validity regime.
    #[error("validity error: {0}")]
    Validity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
