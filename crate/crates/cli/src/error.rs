use std::fmt;
use std::process::ExitCode;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration values.
    Usage(String),
    /// Unreadable, unwritable or malformed files and signals.
    Input(String),
    /// Calibration or numerical failure.
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

impl From<easr_core::Error> for CliError {
    fn from(e: easr_core::Error) -> Self {
        use easr_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(_) => CliError::Usage(msg),
            E::Calibration(_) | E::Numeric(_) => CliError::Numeric(msg),
            _ => CliError::Input(msg),
        }
    }
}

/// Attaches a path to an I/O error.
pub fn io_err(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}
