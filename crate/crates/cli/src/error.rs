use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{at}: {message}")]
    Parse { at: String, message: String },

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Domain(String),

    #[error("validation failed: {0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<ghostsim::Error> for CliError {
    fn from(e: ghostsim::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
