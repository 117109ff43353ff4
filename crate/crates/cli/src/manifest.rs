//! Run manifest written next to every output set.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use ris_mimo::harness::ScenarioConfig;
use serde::Serialize;

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// `incomplete` until the command finishes, then `complete` or `failed`.
    pub status: &'static str,
    pub master_seed: u64,
    /// Worker threads; results do not depend on it.
    pub threads: usize,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    /// Output files relative to the output directory.
    pub outputs: Vec<String>,
    pub error: Option<String>,
    /// Effective configuration after overrides.
    pub config: ScenarioConfig,
}

pub fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn begin(command: &str, cfg: &ScenarioConfig, threads: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_owned(),
            status: "incomplete",
            master_seed: cfg.seeds.master,
            threads,
            started_unix: unix_now(),
            finished_unix: None,
            outputs: Vec::new(),
            error: None,
            config: cfg.clone(),
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn finish(&mut self, outcome: &Result<Vec<String>, CliError>) {
        self.finished_unix = Some(unix_now());
        match outcome {
            Ok(files) => {
                self.status = "complete";
                self.outputs = files.clone();
            }
            Err(e) => {
                self.status = "failed";
                self.error = Some(e.to_string());
            }
        }
    }
}
