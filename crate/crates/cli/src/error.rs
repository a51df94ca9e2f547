//! CLI error type with a fixed exit-code mapping:
//! 2 = configuration error, 3 = numeric non-convergence / high variance,
//! 4 = verification failed, 5 = verification inconclusive, 1 = I/O.

use nonloc_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                CoreError::NoConvergence { .. } | CoreError::HighVariance { .. },
            ) => 3,
            CliError::Core(CoreError::Io(_)) => 1,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
