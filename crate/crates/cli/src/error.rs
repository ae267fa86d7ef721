use thiserror::Error;

/// Failures that end a run, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<korovkin_lab::Error> for CliError {
    fn from(err: korovkin_lab::Error) -> Self {
        match err {
            korovkin_lab::Error::Io(_) | korovkin_lab::Error::Csv(_) => Self::Io(err.to_string()),
            other => Self::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::Io(err.to_string())
    }
}
