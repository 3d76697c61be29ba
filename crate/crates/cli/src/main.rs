use std::process::ExitCode;

use clap::Parser;
use janossy_cli::{run, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    match run(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("janossy: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
