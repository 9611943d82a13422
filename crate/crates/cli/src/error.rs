use std::fmt;

use dicke_engine::Error;

pub const EXIT_INVALID_CONFIGURATION: i32 = 2;
pub const EXIT_CONVERGENCE_FAILURE: i32 = 3;
pub const EXIT_VERIFICATION_FAILURE: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Config(String),
    /// Output written, but a comparison exceeded its tolerance.
    Verification(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_convergence_failure() => EXIT_CONVERGENCE_FAILURE,
            CliError::Core(_) | CliError::Config(_) => EXIT_INVALID_CONFIGURATION,
            CliError::Verification(_) => EXIT_VERIFICATION_FAILURE,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
