//! Run manifests: what was run, with which configuration and seed, on which
//! inputs, producing which outputs. Files are identified by SHA-256.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub version: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

impl RunManifest {
    pub fn new(command: Vec<String>, config: BTreeMap<String, String>, seed: Option<u64>) -> Self {
        let canonical: String = config.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        Self {
            command,
            config_sha256: sha256_hex(canonical.as_bytes()),
            config,
            seed,
            version: crate::VERSION.to_owned(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Records an input file under the name it was given.
    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    /// Records an output file; `base` is stripped from the recorded path so
    /// manifests do not depend on where a run directory lives.
    pub fn add_output(&mut self, path: impl AsRef<Path>, base: Option<&Path>) -> Result<()> {
        let path = path.as_ref();
        let shown = base
            .and_then(|b| path.strip_prefix(b).ok())
            .unwrap_or(path)
            .display()
            .to_string();
        self.outputs.push(FileDigest {
            path: shown,
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("bad manifest: {e}")))
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path, self.to_json().as_bytes())
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::arg(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    result.map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}
