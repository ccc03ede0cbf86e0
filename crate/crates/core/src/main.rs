use std::process::ExitCode;

use clap::Parser;
use raytomo::cli::{error_json, run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(error) => {
            eprintln!("{}", error_json(&error));
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
