use thiserror::Error;

/// Failures of the command-line front end, each with a stable exit code:
/// 1 for unreadable or malformed input, 2 for out-of-range parameters, 3
/// when an inequality is not violated at all, 4 for numerical failures.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed input file or argument.
    #[error("parse error: {0}")]
    Parse(String),
    /// Parameters outside their admissible range, including violated
    /// family constraints and failed bound verification.
    #[error("{0}")]
    Range(String),
    #[error("{0}")]
    NoViolation(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] bellkit_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } => 1,
            CliError::Range(_) => 2,
            CliError::NoViolation(_) => 3,
            CliError::Core(bellkit_core::Error::NoViolation { .. }) => 3,
            CliError::Core(bellkit_core::Error::InvalidArgument(_)) => 2,
            CliError::Core(_) => 4,
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> CliError {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
