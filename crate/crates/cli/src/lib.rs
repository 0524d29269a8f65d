//! Command-line front end for `relugeo`: argument parsing, CSV input and
//! JSON run records.

pub mod commands;
pub mod data;
pub mod error;
pub mod record;

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;

use commands::{Command, Outcome};
use error::CliError;
use record::{RunRecord, SCHEMA_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "relugeo",
    version,
    about = "Geometry of the image of shallow network weight maps"
)]
pub struct Cli {
    /// Write the JSON run record here.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

fn timestamp() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_default()
}

/// Runs one command and wraps the result in a record. `rerun` is resolved
/// to the stored command first, so the record describes the actual analysis.
pub fn run(command: &Command) -> Result<(RunRecord, String), CliError> {
    let command = match command {
        Command::Rerun { record } => RunRecord::read(record)?.config,
        other => other.clone(),
    };
    let start = Instant::now();
    let Outcome {
        results,
        summary,
        digests,
        seed,
    } = commands::execute(&command)?;
    let record = RunRecord {
        schema_version: SCHEMA_VERSION,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.name(),
        config: command,
        seed,
        digests,
        results,
        timestamp: timestamp(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((record, summary))
}

/// Full CLI behaviour minus process exit: prints the summary and writes the
/// record when `--out` is given.
pub fn main_with(cli: Cli) -> Result<(), CliError> {
    let (record, summary) = run(&cli.command)?;
    print!("{summary}");
    if let Some(path) = &cli.out {
        record.write(path)?;
    }
    Ok(())
}
