use std::process::ExitCode;

use clap::Parser;
use detnet_envelope_cli::cli::Cli;
use detnet_envelope_cli::commands::run;

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
