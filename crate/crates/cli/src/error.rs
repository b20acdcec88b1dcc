use std::fmt;

/// Failure categories, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
    Parse(String),
    Fit(String),
    Selftest(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Fit(_) => 4,
            CliError::Selftest(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid argument: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Fit(m) => write!(f, "fit failed: {m}"),
            CliError::Selftest(m) => write!(f, "selftest failed: {m}"),
        }
    }
}

impl From<twinsg_core::Error> for CliError {
    fn from(e: twinsg_core::Error) -> Self {
        match e {
            twinsg_core::Error::InvalidArgument(m) => CliError::Validation(m),
            twinsg_core::Error::FitFailure(m) => CliError::Fit(m),
            other => CliError::Validation(other.to_string()),
        }
    }
}
