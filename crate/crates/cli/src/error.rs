use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    /// Invalid configuration value; the message names the key.
    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] etcsim_core::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("not certified: {0}")]
    NotCertified(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Syntax { .. } | CliError::Invalid(_) => 2,
            CliError::Core(etcsim_core::Error::Config(_)) => 2,
            CliError::NotCertified(_) => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
