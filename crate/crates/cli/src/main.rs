//! `tugames`: core, balancedness and witness reports for TU games, as JSON.

mod commands;
mod family;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tugames::set_algebra::DEFAULT_HULL_CAP;

pub const EXIT_DECIDED: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

const CAP_ENV: &str = "TUGAMES_HULL_CAP";

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }

    pub fn context(self, at: &str) -> Self {
        CliError {
            code: self.code,
            message: format!("{at}: {}", self.message),
        }
    }
}

impl From<tugames::Error> for CliError {
    fn from(e: tugames::Error) -> Self {
        let code = if e.is_resource_cap() {
            EXIT_CAP
        } else if e.is_internal() {
            EXIT_INTERNAL
        } else {
            EXIT_INPUT
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tugames",
    version,
    about = "Exact core and balancedness reports for TU games"
)]
pub struct Args {
    /// One of: core, certify, supcheck, witness, hull, atoms, norm, ladder,
    /// probe, epsilon, restricted-core, bounded-balanced.
    pub command: String,

    /// Game file (JSON).
    pub game: Option<PathBuf>,

    /// Coalitions as `1,2;~3`, several families separated by `|`.
    #[arg(long)]
    pub family: Option<String>,

    /// Named rule, used instead of a game file.
    #[arg(long)]
    pub rule: Option<String>,

    /// Number of ladder or probe stages.
    #[arg(long)]
    pub n: Option<u32>,

    /// Comma-separated positive rationals.
    #[arg(long)]
    pub eps: Option<String>,

    /// Radius `v(N) − 2L` for `witness`, threshold for `ladder`.
    #[arg(long = "R")]
    pub r: Option<String>,

    /// Largest field hull to build.
    #[arg(long)]
    pub cap: Option<usize>,

    /// Ladder constraint pool: lean or full.
    #[arg(long, default_value = "lean")]
    pub pool: String,

    /// Write ladder bounds to this CSV file.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// Point masses as `point:weight,...` for `norm`.
    #[arg(long)]
    pub measure: Option<String>,

    /// `naturals` or `finite:<n>`, for `norm` without a game file.
    #[arg(long)]
    pub universe: Option<String>,
}

impl Args {
    pub fn cap(&self) -> Result<usize, CliError> {
        if let Some(cap) = self.cap {
            return Ok(cap);
        }
        match std::env::var(CAP_ENV) {
            Ok(text) => text
                .trim()
                .parse()
                .map_err(|_| CliError::input(format!("{CAP_ENV}=`{text}` is not a count"))),
            Err(_) => Ok(DEFAULT_HULL_CAP),
        }
    }
}

fn run(args: &Args) -> Result<serde_json::Value, CliError> {
    let registry = commands::CommandRegistry::builtin();
    let command = registry.get(&args.command)?;
    command.run(args)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_DECIDED
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&args) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            // A closed pipe is the reader's choice, not a failure.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(EXIT_DECIDED)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
