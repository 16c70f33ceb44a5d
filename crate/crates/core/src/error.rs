use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A vanishing denominator; callers near removable points re-route.
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    /// A geometric ratio of modulus >= 1 under the strict policy.
    #[error("convergence error: geometric ratio {0} has modulus >= 1")]
    Convergence(String),
    #[error("singular sample: {0}")]
    SingularSample(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// A reconstructed polynomial disagreed with a check point.
    #[error("fit check failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
