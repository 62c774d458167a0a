use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(relkac_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Fail(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Fail(_) => 1,
        }
    }
}

impl From<relkac_core::Error> for CliError {
    fn from(e: relkac_core::Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e)
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
