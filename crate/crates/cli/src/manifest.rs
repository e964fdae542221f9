use std::path::{Path, PathBuf};

use serde::Serialize;

/// Record of one run, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub threads: Option<usize>,
    pub parameters: serde_json::Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    /// Wall-clock timings; the only part that differs between identical runs.
    pub timings: serde_json::Value,
}

impl RunManifest {
    pub fn new(subcommand: &str, threads: Option<usize>) -> Self {
        RunManifest {
            subcommand: subcommand.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command_line: std::env::args().collect(),
            threads,
            parameters: serde_json::Value::Null,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timings: serde_json::json!({}),
        }
    }

    pub fn write(&self, path: &Path) -> awe::Result<()> {
        awe::export::write_json(path, self)
    }
}

/// `<file>.manifest.json` for single-file outputs.
pub fn beside(file: &Path) -> PathBuf {
    let mut name = file.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    file.with_file_name(name)
}
