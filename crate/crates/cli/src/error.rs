use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] priorlab::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            message: message.into(),
        }
    }

    /// 2 for malformed input, 1 for anything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Core(priorlab::Error::Parse { .. }) => 2,
            _ => 1,
        }
    }
}

/// Core parse errors keep their line number in the CLI error.
pub fn lift(e: priorlab::Error) -> CliError {
    match e {
        priorlab::Error::Parse { line, message } => CliError::Parse { line, message },
        other => CliError::Core(other),
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
