use std::process::ExitCode;

use biharmonic_cli::{run, threads_from_env, Cli, CliError, THREADS_ENV};
use clap::Parser;

fn real_main() -> Result<(), CliError> {
    let config = Cli::parse().into_config()?;
    let threads = threads_from_env(std::env::var(THREADS_ENV).ok().as_deref())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::invalid(THREADS_ENV, e.to_string()))?;
    let artifacts = pool.install(|| run(&config))?;
    eprintln!("wrote {} and {}", artifacts.output.display(), artifacts.sidecar.display());
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
