use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Record of one run: what was asked, what was read, what was written, and
/// how it ended. Written to `manifest.toml` in the output directory on both
/// success and failure so every output directory is self-describing.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub subcommand: String,
    pub status: String,
    pub seed: u64,
    pub duration_ms: u64,
    pub parameters: toml::Table,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Accumulates manifest data while a subcommand executes.
pub struct RunRecorder {
    start: Instant,
    subcommand: String,
    seed: u64,
    out_dir: PathBuf,
    parameters: toml::Table,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl RunRecorder {
    pub fn new(subcommand: &str, seed: u64, out_dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("creating output directory {}", out_dir.display()))?;
        Ok(RunRecorder {
            start: Instant::now(),
            subcommand: subcommand.to_string(),
            seed,
            out_dir: out_dir.to_path_buf(),
            parameters: toml::Table::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Echoes one resolved parameter into the manifest.
    pub fn param(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    /// Registers an input file and digests it.
    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        let bytes = std::fs::read(path)
            .with_context(|| format!("reading input {}", path.display()))?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex,
        });
        Ok(())
    }

    /// Writes an output file under the run directory and registers it.
    pub fn write_output(&mut self, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("writing output {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    /// Finalizes the manifest with the given status and writes it. Returns
    /// the manifest path.
    pub fn finish(self, status: Result<(), &anyhow::Error>) -> anyhow::Result<PathBuf> {
        let manifest = RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: self.subcommand,
            status: match status {
                Ok(()) => "ok".to_string(),
                Err(e) => format!("error: {e:#}"),
            },
            seed: self.seed,
            duration_ms: self.start.elapsed().as_millis() as u64,
            parameters: self.parameters,
            inputs: self.inputs,
            outputs: self.outputs,
        };
        let path = self.out_dir.join("manifest.toml");
        let text = toml::to_string_pretty(&manifest).context("serializing manifest")?;
        std::fs::write(&path, text)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
