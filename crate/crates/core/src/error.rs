use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The total noise covariance lost positive definiteness numerically.
    #[error("noise covariance is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    SingularCovariance { min_eigenvalue: f64 },

    #[error("detection failed: {0}")]
    DetectionFailure(String),

    #[error("codeword space {levels}^{len} exceeds the exhaustive-search limit of {limit}")]
    SpaceTooLarge { levels: usize, len: usize, limit: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures raised by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularCovariance { .. } | Error::DetectionFailure(_))
    }
}
