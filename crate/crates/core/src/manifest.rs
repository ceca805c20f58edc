//! Sidecar manifests recording how an output file was produced.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::pipeline::TOOL_VERSION;
use crate::{json, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFingerprint {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timestamps {
    /// Seconds since the Unix epoch; honours `SOURCE_DATE_EPOCH`.
    pub created_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub command: String,
    /// Arguments sufficient to re-run the command.
    pub args: Vec<String>,
    pub tool_version: String,
    pub timestamps: Timestamps,
    /// Effective settings (tokenizer, thresholds, metric parameters...).
    pub config: serde_json::Value,
    pub inputs: Vec<InputFingerprint>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    /// `run_id` hashes the command, the effective config and the input
    /// contents, so identical inputs and settings give the same id.
    pub fn new(
        command: &str,
        args: Vec<String>,
        config: serde_json::Value,
        inputs: Vec<InputFingerprint>,
        outputs: Vec<String>,
    ) -> Result<Self> {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(b"\0");
        h.update(json::to_canonical_line(&config)?.as_bytes());
        for i in &inputs {
            h.update(b"\0");
            h.update(i.sha256.as_bytes());
        }
        Ok(RunManifest {
            run_id: hex::encode(h.finalize()),
            command: command.to_string(),
            args,
            tool_version: TOOL_VERSION.to_string(),
            timestamps: Timestamps {
                created_unix: now_unix(),
            },
            config,
            inputs,
            outputs,
        })
    }

    pub fn with_run_id(mut self, run_id: impl Into<String>) -> Self {
        self.run_id = run_id.into();
        self
    }

    pub fn to_json(&self) -> Result<String> {
        json::to_canonical_string(self)
    }

    /// `<output>.manifest.json` next to the output.
    pub fn sidecar_path(output: &Path) -> std::path::PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let path = Self::sidecar_path(output);
        std::fs::write(&path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

pub fn fingerprint_file(path: &Path) -> Result<InputFingerprint> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputFingerprint {
        path: path.to_string_lossy().replace('\\', "/"),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

pub fn fingerprint_bytes(label: &str, bytes: &[u8]) -> InputFingerprint {
    InputFingerprint {
        path: label.to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn now_unix() -> u64 {
    if let Some(epoch) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return epoch;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Convenience for building `config` objects.
pub fn config_object(pairs: impl IntoIterator<Item = (&'static str, serde_json::Value)>) -> serde_json::Value {
    let map: BTreeMap<String, serde_json::Value> =
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    serde_json::to_value(map).unwrap_or_default()
}
