use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Input value outside the domain of an operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A positive bit budget was requested for a spectrum that carries no
    /// signal energy above the noise floor.
    #[error("cannot spend {bits} bits on a pure-noise spectrum")]
    InfeasibleSpectrum { bits: f64 },

    /// Distance below the 1 m path-loss clamp reached the path-loss model.
    #[error("distance {0} m is below the 1 m path-loss clamp")]
    DistanceBelowClamp(f64),

    /// Matrix shapes do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A noise covariance block that should be positive definite is not.
    #[error("noise covariance of AP {ap} is not positive definite")]
    SingularNoise { ap: usize },

    /// The water level search failed to bracket or converge.
    #[error("water-filling search did not converge (budget {bits} bits)")]
    NoConvergence { bits: f64 },

    /// Combination that is not defined, such as linear allocation on a tree.
    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for errors that make a sweep point infeasible rather than the
    /// whole run malformed.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig(_) | Error::Unsupported(_) | Error::InfeasibleSpectrum { .. }
        )
    }
}
