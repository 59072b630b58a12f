//! `canonphase`: phase-estimation curves, optimal photon numbers and phase
//! distributions for the optimal state under photon loss.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::Failure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: could not start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Curve(a) => commands::run_curve(a),
        Command::Nopt(a) => commands::run_nopt(a),
        Command::Dist(a) => commands::run_dist(a),
        Command::Validate(a) => commands::run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Io(_) => 1,
            Failure::Validation(_) => 3,
        }
    }
}
