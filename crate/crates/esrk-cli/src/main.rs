//! `esrk` — method inspection, benchmark runs, convergence studies, energy
//! histories, and stability-region scans, with CSV output.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure.

mod cli;
mod commands;
mod config;
mod output;

use clap::Parser;

fn main() {
    // Clap's own failures (bad flags, missing arguments) exit with 2.
    let parsed = cli::Cli::parse();
    match commands::dispatch(parsed) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
