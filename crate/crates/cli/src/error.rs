use std::fmt;

/// Failure of a command, split by who is at fault.
#[derive(Debug)]
pub enum CliError {
    /// Bad input, flags or files. Exit code 2.
    User(String),
    /// A bug or an unexpected numerical failure. Exit code 1.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<dhwt_core::Error> for CliError {
    fn from(e: dhwt_core::Error) -> Self {
        use dhwt_core::Error::*;
        match e {
            InvalidParameter(_)
            | UnknownWavelet(_)
            | LevelsOutOfRange { .. }
            | OutOfRange(_)
            | CorruptContainer(_)
            | DegreeOutOfRange(_)
            | QuadratureOrder { .. } => CliError::User(e.to_string()),
            NonFinite | ZeroEnergy | OddLength(_) | LengthMismatch(..) | DimensionMismatch(_) => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::User(format!("writing CSV: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
