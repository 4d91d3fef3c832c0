//! Output directories, checksums and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const TOOL: &str = "hooke-peo";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the parameters that determine a run's results.
pub fn param_hash(config: &RunConfig) -> String {
    let text: String = config
        .parameters()
        .iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect();
    sha256_hex(text.as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub param_hash: String,
    pub parameters: BTreeMap<String, String>,
    pub files: Vec<FileEntry>,
    /// Inputs consumed by the run, such as a basis table and its hash.
    pub provenance: BTreeMap<String, String>,
    pub results: serde_json::Value,
}

impl Manifest {
    pub fn file(&self, name: &str) -> Option<&FileEntry> {
        self.files.iter().find(|f| f.name == name)
    }
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data {
        path,
        msg: e.to_string(),
    })
}

/// Collects data files written by one run and seals them with a manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: BTreeMap<String, FileEntry>,
    provenance: BTreeMap<String, String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::io(root, e))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
            provenance: BTreeMap::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        if name == MANIFEST {
            return Err(CliError::Config(format!("{MANIFEST} is reserved")));
        }
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.record_bytes(name, contents.as_bytes());
        Ok(())
    }

    /// Lists a file already present from an earlier run.
    pub fn keep_existing(&mut self, name: &str) -> Result<(), CliError> {
        let path = self.path(name);
        let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
        self.record_bytes(name, &bytes);
        Ok(())
    }

    fn record_bytes(&mut self, name: &str, bytes: &[u8]) {
        self.files.insert(
            name.to_string(),
            FileEntry {
                name: name.to_string(),
                sha256: sha256_hex(bytes),
                bytes: bytes.len() as u64,
            },
        );
    }

    pub fn provenance(&mut self, key: &str, value: impl Into<String>) {
        self.provenance.insert(key.to_string(), value.into());
    }

    pub fn finish(self, config: &RunConfig, results: serde_json::Value) -> Result<Manifest, CliError> {
        let manifest = Manifest {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: config.command.name().to_string(),
            param_hash: param_hash(config),
            parameters: config.parameters(),
            files: self.files.into_values().collect(),
            provenance: self.provenance,
            results,
        };
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.root.join(MANIFEST);
        fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(manifest)
    }
}

/// `{:.16e}`: 17 significant digits, lossless for `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}
