//! Command-line front end: `spectrum`, `verify`, `ssusy-map` and `eig-dump`.
//!
//! Exit codes: 0 when every selected check passes, 1 when a check fails,
//! 2 for invalid input (bad flags, parameters outside their domain,
//! unreadable config or unwritable output).

pub mod checks;
pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;

use clap::{CommandFactory, FromArgMatches};

use config::{Cli, Command, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

fn command() -> clap::Command {
    Cli::command().mut_subcommand("verify", |c| c.after_help(commands::verify_help()))
}

pub fn parse<I, T>(args: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = command().try_get_matches_from(args)?;
    Cli::from_arg_matches(&matches)
}

pub fn execute(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, &RunConfig::resolve(&a.common, None)?),
        Command::Verify(a) => commands::verify(a, &RunConfig::resolve(&a.common, None)?),
        Command::SsusyMap(a) => commands::ssusy_map(a, &RunConfig::resolve(&a.common, None)?),
        Command::EigDump(a) => commands::eig_dump(a, &RunConfig::resolve(&a.common, None)?),
    }
}

/// Parse, run and map the outcome to an exit code. Usage and help output go
/// through clap; other errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match parse(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_PASS };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => EXIT_PASS,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INVALID_INPUT
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = if let Some(io) = c.downcast_ref::<std::io::Error>() {
            Some(io.kind())
        } else if let Some(json) = c.downcast_ref::<serde_json::Error>() {
            json.io_error_kind()
        } else if let Some(csv::ErrorKind::Io(io)) = c.downcast_ref::<csv::Error>().map(|e| e.kind()) {
            Some(io.kind())
        } else {
            None
        };
        kind == Some(std::io::ErrorKind::BrokenPipe)
    })
}
