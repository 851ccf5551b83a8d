//! CLI error classes mapped to exit codes: validation errors exit 2, I/O
//! errors exit 1, desk-scale "target unreachable" results exit 3.

use incoherent_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Validation(String),
    TargetUnreachable(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::TargetUnreachable(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Validation(m) | CliError::TargetUnreachable(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::TargetUnreachable { .. } => CliError::TargetUnreachable(err.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}
