use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Identifies a run: identical manifests reproduce identical artifacts.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub seed: u64,
    pub workers: usize,
    pub output_dir: String,
    /// File name to hex SHA-256.
    pub artifacts: std::collections::BTreeMap<String, String>,
    /// Resolved configuration as TOML text.
    pub config: String,
}

/// Collects artifacts written under one output directory.
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push((name.to_string(), bytes));
        Ok(())
    }

    /// Renders a CSV through `f` and stores it.
    pub fn csv<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> qst_core::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, buf)
    }

    pub fn toml<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = toml::to_string_pretty(value).context("serializing summary")?;
        self.write(name, text.into_bytes())
    }

    pub fn finish(self, subcommand: &str, seed: u64, workers: usize, config: String) -> Result<RunManifest> {
        let artifacts = self
            .written
            .iter()
            .map(|(name, bytes)| (name.clone(), hex::encode(Sha256::digest(bytes))))
            .collect();
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            seed,
            workers,
            output_dir: self.dir.display().to_string(),
            artifacts,
            config,
        };
        let text = toml::to_string_pretty(&manifest).context("serializing manifest")?;
        fs::write(self.dir.join("manifest.toml"), text)?;
        Ok(manifest)
    }
}
