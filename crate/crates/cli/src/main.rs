//! `nkline`: build, verify and inspect no-(k+1)-in-line point sets.
//!
//! Exit codes: 0 certified, 1 usage or parse error, 2 construction failure,
//! 3 verification failure.

mod bounds;
mod construct;
mod stats;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 1,
    Construction = 2,
    Verification = 3,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

#[derive(Parser, Debug)]
#[command(name = "nkline", version, about = "No-(k+1)-in-line point sets on the n x n grid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a certified k·n point set and write it to a file.
    Construct(construct::Args),
    /// Check a point-set file against a line bound.
    Verify(verify::Args),
    /// Count generic secants with many grid points.
    Stats(stats::Args),
    /// Evaluate the probabilistic construction's constants.
    Bounds(bounds::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Exit::Ok,
                _ => Exit::Usage,
            }
            .into();
        }
    };
    let result = match cli.command {
        Command::Construct(a) => construct::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Stats(a) => stats::run(a),
        Command::Bounds(a) => bounds::run(a),
    };
    match result {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("error: {e:#}");
            Exit::Usage.into()
        }
    }
}
