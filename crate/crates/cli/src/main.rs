mod args;
mod commands;
mod config;
mod output;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::error::ErrorKind;

use args::{Cli, Command, Format};
use output::Rendered;

/// Exit statuses.
const EXIT_USAGE: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    Clap(clap::Error),
    Usage(String),
    Budget(String),
    Invariant(String),
    Io(std::io::Error),
}

impl From<momentsq_core::Error> for Failure {
    fn from(e: momentsq_core::Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Clap(e) => write!(f, "{e}"),
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Budget(m) => write!(f, "budget exceeded: {m}"),
            Failure::Invariant(m) => write!(f, "invariant failed: {m}"),
            Failure::Io(e) => write!(f, "error: {e}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(Failure::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let rendered = match &cli.command {
        Command::Syzygy(a) => commands::syzygy(a, cli.timing)?,
        Command::Vino(a) => commands::vino(a, cli.timing)?,
        Command::Bounds(a) => commands::bounds(a)?,
        Command::Ratio(a) => commands::ratio(a, cli.timing)?,
        Command::Verify(a) => verify::run(a, cli.timing)?,
    };
    let format = cli.format.unwrap_or(match cli.command {
        Command::Bounds(_) => Format::Csv,
        _ => Format::Json,
    });
    output::emit(&rendered, format, cli.output.as_deref())?;
    match rendered {
        Rendered { failure: Some(msg), .. } => Err(Failure::Invariant(msg)),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let result = config::parse(std::env::args_os().collect()).and_then(run);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Clap(e)) => {
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(match e {
                Failure::Budget(_) => EXIT_BUDGET,
                Failure::Invariant(_) => EXIT_INVARIANT,
                _ => EXIT_USAGE,
            })
        }
    }
}
