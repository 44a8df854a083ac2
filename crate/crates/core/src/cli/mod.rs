//! Command-line front end.

pub mod config;
pub mod output;
pub mod run;
pub mod verify;

use thiserror::Error;

pub use config::{parse_config, Command, Format, ModelSource, RunConfig, SweepSettings};
pub use run::run;
pub use verify::{verify_paper, Fault, VerifyOptions, VerifyReport};

/// Seed for randomized checks in `verify-paper`.
pub const SEED_ENV: &str = "SPINSPEC_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` or `--version` output; not a failure.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }
}

/// Exit code for a failed `verify-paper` run.
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let result = parse_config(args).and_then(|config| run(&config));
    match result {
        Ok(code) => code,
        Err(CliError::Help(text)) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("spinspec: {e}");
            e.exit_code()
        }
    }
}
