//! Command-line surface.

use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

use crate::config::{Command, OutputFormat, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "biharmonic", version, about = "Biharmonic drive, junction and shot-noise sweeps")]
pub struct Cli {
    /// Repeat a run from a JSON sidecar (or a bare run configuration).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; a `<output>.json` sidecar is written next to it.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

/// Accept either a full sidecar or the bare configuration inside it.
pub fn parse_run_config(text: &str) -> Result<RunConfig, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let config = match value {
        Value::Object(mut map) if map.contains_key("config") => map.remove("config").unwrap_or(Value::Null),
        other => other,
    };
    serde_json::from_value(config).map_err(|e| e.to_string())
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        let mut config = match (self.config, self.command) {
            (Some(_), Some(_)) => {
                return Err(CliError::invalid("--config", "cannot be combined with a subcommand"));
            }
            (Some(path), None) => {
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Config {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                parse_run_config(&text).map_err(|reason| CliError::Config { path, reason })?
            }
            (None, Some(command)) => RunConfig {
                command,
                output_format: OutputFormat::Csv,
                output: match &self.output {
                    Some(p) => p.clone(),
                    None => return Err(CliError::invalid("--output", "an output file is required")),
                },
            },
            (None, None) => {
                return Err(CliError::invalid("command", "give a subcommand or --config"));
            }
        };
        if let Some(output) = self.output {
            config.output = output;
        }
        if let Some(format) = self.format {
            config.output_format = format;
        }
        config.command = config.command.resolved();
        Ok(config)
    }
}
