use std::path::PathBuf;

use thiserror::Error;

/// Everything that can stop a run, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Unreadable configuration text: bad syntax, wrong types, unknown keys.
    #[error("{path}: {message}")]
    Syntax { path: PathBuf, message: String },
    /// Well-formed configuration that breaks a scenario invariant.
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error(transparent)]
    Numerical(mvmfdr::Error),
}

impl CliError {
    pub const EXIT_CONFIG: u8 = 2;
    pub const EXIT_NUMERICAL: u8 = 3;
    pub const EXIT_IO: u8 = 4;
    pub const EXIT_INVALID: u8 = 5;

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => Self::EXIT_IO,
            CliError::Syntax { .. } => Self::EXIT_CONFIG,
            CliError::Invalid { .. } => Self::EXIT_INVALID,
            CliError::Numerical(_) => Self::EXIT_NUMERICAL,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Syntax { .. } => "config",
            CliError::Invalid { .. } => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }

    /// One-line `error kind=<kind> field=<field> message="<text>"` diagnostic.
    pub fn diagnostic(&self) -> String {
        let field = match self {
            CliError::Invalid { field, .. } => field.clone(),
            CliError::Numerical(e) => e.field().unwrap_or("-").to_string(),
            _ => "-".to_string(),
        };
        let message = self.to_string().replace('\n', " ").replace('"', "'");
        format!("error kind={} field={field} message=\"{message}\"", self.kind())
    }
}

/// Core errors: input problems are validation failures, the rest numerical.
impl From<mvmfdr::Error> for CliError {
    fn from(e: mvmfdr::Error) -> Self {
        match e {
            mvmfdr::Error::InvalidInput { field, reason } => CliError::invalid(field, reason),
            other => CliError::Numerical(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
