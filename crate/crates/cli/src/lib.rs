//! Command-line front end for the photon uncertainty toolkit.
//!
//! [`main_with`] is the whole program: it merges the config file into the
//! arguments, caps the thread pool, runs one subcommand and writes its
//! report to stdout or atomically to `--output`. Failures print a JSON
//! error object on stderr and map to exit status 2 (configuration),
//! 3 (numerics) or 4 (evaluation).

pub mod args;
pub mod commands;
pub mod error;
pub mod expr;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{expand_config, Cli};
use crate::error::CliError;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "PHOTON_UR_THREADS";

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // A pool may already exist when running in-process; the cap then stays as set.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(argv: Vec<OsString>) -> Result<Option<CliError>, CliError> {
    configure_threads()?;
    let argv = expand_config(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return Ok(None);
        }
        Err(e) => return Err(CliError::Config(e.kind().to_string() + ": " + e.render().to_string().trim())),
    };
    let (report, status) = commands::run(&cli.command)?;
    let format = cli.format.unwrap_or_else(|| commands::default_format(&cli.command));
    let text = report.render(format)?;
    match &cli.output {
        Some(path) => output::write_atomic(path, &text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
    }
    Ok(status)
}

/// Runs the program on `argv` and returns the exit status.
pub fn main_with(argv: Vec<OsString>) -> i32 {
    let failure = match execute(argv) {
        Ok(None) => return 0,
        Ok(Some(status)) => status,
        Err(e) => e,
    };
    eprintln!("{}", failure.report());
    failure.exit_code()
}
