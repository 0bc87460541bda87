use thiserror::Error;

/// Crate-wide error type. The CLI maps variants onto process exit codes:
/// invalid input -> 1, golden-table mismatch -> 2, numerical blowup -> 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("golden table mismatch: {0}")]
    GoldenMismatch(String),

    #[error("numerical blowup at t = {t}")]
    Blowup { t: f64 },

    #[error("matrix is not symmetric within tolerance (relative asymmetry {asymmetry:e})")]
    AsymmetricMatrix { asymmetry: f64 },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    EigenNonConvergence { sweeps: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GoldenMismatch(_) => 2,
            Error::Blowup { .. } => 3,
            _ => 1,
        }
    }
}
