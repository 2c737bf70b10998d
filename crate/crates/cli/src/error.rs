use thiserror::Error;

/// Failure of a command, with the process exit status it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dilute_fermi::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    /// 1 validation, 2 numerical failure, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        use dilute_fermi::Error as E;
        match self {
            CliError::Config(_) => 1,
            CliError::Core(
                E::InvalidInput(_)
                | E::Capacity { .. }
                | E::IncompleteShell { .. }
                | E::EmptySector { .. }
                | E::DensityMismatch(..),
            ) => 1,
            CliError::Core(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}
