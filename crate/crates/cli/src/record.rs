use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::commands::Command;
use crate::data::InputDigest;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to audit or repeat one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub artifact_version: String,
    /// Subcommand path, e.g. `image member`.
    pub command: String,
    /// The parsed command with every option filled in; feeding it back to
    /// `rerun` repeats the analysis.
    pub config: Command,
    pub seed: Option<u64>,
    pub digests: BTreeMap<String, InputDigest>,
    pub results: serde_json::Value,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub wall_time_seconds: f64,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let record: RunRecord = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "record schema version {} is not supported (expected {SCHEMA_VERSION})",
                record.schema_version
            )));
        }
        Ok(record)
    }
}
