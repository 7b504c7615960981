use std::fmt;
use std::process::ExitCode;

/// A failed command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag values: exit 2.
    Usage(String),
    /// Unreadable or invalid data, or a failed computation: exit 1.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Data(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        };
        // Diagnostics are always a single line.
        f.write_str(&msg.replace('\n', " "))
    }
}

impl From<tmi_core::Error> for CliError {
    fn from(e: tmi_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}
