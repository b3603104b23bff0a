//! Command-line front end for the `biharmonic` library: parses a run
//! configuration, evaluates the requested sweep in parallel and writes the
//! table plus a JSON sidecar that can repeat the run.

pub mod args;
pub mod config;
pub mod error;
pub mod grid_spec;
pub mod job;
pub mod output;

use std::path::PathBuf;

pub use args::{parse_run_config, Cli};
pub use config::{Command, OutputFormat, RunConfig};
pub use error::CliError;
pub use grid_spec::{parse_grid, GridSpec};
pub use job::{Job, Outcome, Table};
pub use output::Sidecar;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "BIHARMONIC_THREADS";

/// Files produced by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub output: PathBuf,
    pub sidecar: PathBuf,
    pub summary: serde_json::Value,
}

/// Validate, compute and write one run.
pub fn run(config: &RunConfig) -> Result<Artifacts, CliError> {
    let config = RunConfig {
        command: config.command.clone().resolved(),
        ..config.clone()
    };
    let job = Job::plan(&config.command)?;
    let outcome = job.execute()?;
    let sidecar_path = output::sidecar_path(&config.output);
    output::write_file(&config.output, &output::render(&outcome.table, config.output_format))?;
    let sidecar = Sidecar::new(config.clone(), outcome.tolerances, outcome.summary.clone());
    output::write_file(&sidecar_path, &sidecar.to_json())?;
    Ok(Artifacts {
        output: config.output,
        sidecar: sidecar_path,
        summary: outcome.summary,
    })
}

/// Thread count requested through [`THREADS_ENV`], if any.
pub fn threads_from_env(value: Option<&str>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(text) => match text.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::invalid(THREADS_ENV, format!("`{text}` is not a positive integer"))),
        },
    }
}
