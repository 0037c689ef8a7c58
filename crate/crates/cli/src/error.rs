use thiserror::Error;

/// CLI-level failures, mapped onto process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("numerical failure: {0}")]
    Numerical(#[from] twopulse::Error),
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    /// 1 config, 2 numerical (and i/o), 3 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) | CliError::Numerical(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}
