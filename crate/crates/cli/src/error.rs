use std::process::ExitCode;

use orbitcodes::Error;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
    Output(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(s) => write!(f, "usage: {s}"),
            CliError::Io(s) => write!(f, "io: {s}"),
            CliError::Output(s) => write!(f, "output: {s}"),
        }
    }
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Core(Error::Budget { .. } | Error::TableLimit { .. }) => EXIT_BUDGET,
            CliError::Core(Error::Mismatch(_) | Error::NonIntegral(_)) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        })
    }
}

/// Refuses work above the budget before any of it is done.
pub fn check_budget(needed: u128, budget: u128) -> Result<(), CliError> {
    if needed > budget {
        return Err(Error::Budget { needed, budget }.into());
    }
    Ok(())
}
