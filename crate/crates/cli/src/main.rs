mod adaptive;
mod args;
mod compare;
mod output;
mod region;
mod simulate;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Caps the rayon pool, e.g. `THREEWC_THREADS=1`.
const THREADS_ENV: &str = "THREEWC_THREADS";

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got {v:?}")
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Region(a) => region::region(a),
        Command::Sumdof(a) => region::sumdof(a),
        Command::Simulate(a) => simulate::simulate(a),
        Command::Adaptive(a) => adaptive::adaptive(a),
        Command::Compare(a) => compare::compare(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
