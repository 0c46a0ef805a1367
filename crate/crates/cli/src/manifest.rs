use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = concat!("rbc ", env!("CARGO_PKG_VERSION"));

/// Everything needed to rerun an invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub subcommand: String,
    /// Arguments after the program name, verbatim.
    pub args: Vec<String>,
    /// Directory the arguments' relative paths resolve against.
    pub cwd: PathBuf,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub workers: Option<usize>,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
}

/// Inputs, outputs and seeds gathered while a subcommand runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn seed(&mut self, s: u64) {
        self.seeds.push(s);
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.to_path_buf());
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    /// Writes the manifest next to each output.
    pub fn write_alongside(&self) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| CliError::Format(e.to_string()))?;
        for out in &self.outputs {
            let path = manifest_path(out);
            std::fs::write(&path, format!("{text}\n")).map_err(|e| CliError::io(&path, e))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Format(format!("{}: {e}", path.display())))
    }
}
