//! `tmi`: command-line front end for `tmi-core`.
//!
//! Exit codes: 0 on success, 1 for data or computation errors, 2 for usage
//! errors. Diagnostics are single lines on stderr; results are JSON on
//! stdout (or the manifest's output file for `rank`).

mod args;
mod commands;
mod error;
mod json;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return fail(CliError::Usage(format!(
                "{} (see --help)",
                clap_summary(&e)
            )));
        }
    };
    let outcome = match cli.command {
        Command::Score(a) => commands::score_cmd(a),
        Command::Rank(a) => commands::rank_cmd(a),
        Command::Synth(a) => commands::synth_cmd(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

/// clap's error text without the usage block, on one line.
fn clap_summary(e: &clap::Error) -> String {
    let rendered = e.to_string();
    let body = rendered.split("\n\n").next().unwrap_or_default();
    let body = body.strip_prefix("error: ").unwrap_or(body);
    body.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("tmi: error: {e}");
    e.exit_code()
}
