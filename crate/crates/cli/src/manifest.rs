//! Run registry: every run writes a manifest recording the scenario
//! digest, toolkit version, seed, the resolved SI parameters and a sha256
//! digest of every emitted file.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::Path;

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub scenario: String,
    pub kind: &'static str,
    /// sha256 of the canonical scenario JSON (after seed overrides).
    pub scenario_hash: String,
    pub toolkit_version: &'static str,
    pub timestamp_unix: u64,
    pub seed: u64,
    /// SI-resolved parameters after defaulting, echoed for the record.
    pub resolved_params: serde_json::Value,
    pub files: Vec<FileRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Collects artifacts for one scenario run, writing them under `dir` and
/// recording digests for the manifest.
pub struct Emitter {
    dir: std::path::PathBuf,
    records: Vec<FileRecord>,
}

impl Emitter {
    pub fn new(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), records: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> std::io::Result<()> {
        std::fs::write(self.dir.join(name), bytes)?;
        self.records.push(FileRecord { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(())
    }

    pub fn records(&self) -> &[FileRecord] {
        &self.records
    }

    /// Write the manifest itself (not listed among the files).
    pub fn finish(self, manifest: &RunManifest) -> std::io::Result<()> {
        let bytes = serde_json::to_vec_pretty(manifest).expect("manifest serialization");
        std::fs::write(self.dir.join("manifest.json"), bytes)
    }
}
