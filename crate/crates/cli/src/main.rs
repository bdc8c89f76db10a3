mod cli;
mod commands;
mod grid;
mod report;
mod svg;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use report::Status;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Curve(o) => commands::curve(o),
        Command::Verify(o) => commands::verify(o),
        Command::ScanS(o) => commands::scan_s(o),
        Command::Expansion(o) => commands::expansion(o),
    };
    match outcome {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail | Status::Inconclusive) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
