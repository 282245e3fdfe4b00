use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use morphalign::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Provenance of one run. Two runs whose manifests agree on everything but
/// `timestamp` wrote identical outputs.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_hash: String,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    pub version: String,
    pub timestamp: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        path: path.to_owned(),
        source: e,
    })?;
    Ok(InputDigest {
        path: path.to_owned(),
        sha256: sha256_hex(&bytes),
    })
}

impl RunManifest {
    pub fn new(subcommand: &str, options: &impl Serialize, inputs: &[PathBuf], seed: Option<u64>) -> Result<Self> {
        let options = serde_json::to_string(options).map_err(|e| Error::Config(e.to_string()))?;
        Ok(RunManifest {
            subcommand: subcommand.to_owned(),
            config_hash: sha256_hex(options.as_bytes()),
            inputs: inputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
            seed,
            sampler: None,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        text.push('\n');
        crate::commands::write_file(path, text.as_bytes())
    }
}

/// `out.csv` gets `out.csv.manifest.json`.
pub fn beside(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}
