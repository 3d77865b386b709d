use std::process::ExitCode;

use clap::Parser;
use lexcomp::cli::{self, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let seed = std::env::var(cli::SEED_ENV).ok();
    match cli::run(Cli::parse(), seed.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
