//! Command-line front end for `biharmonic-core`: single evaluations, named verification
//! suites, and JSON/CSV reports.

use std::ffi::OsString;
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("report formatting failed: {0}")]
    Format(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Exit status when every asserted check passed.
pub const EXIT_OK: i32 = 0;
/// Exit status when at least one check failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit status for bad flags, bad configuration, or IO errors.
pub const EXIT_USAGE: i32 = 2;

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match commands::dispatch(argv) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
