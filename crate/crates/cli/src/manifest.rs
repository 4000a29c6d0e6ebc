//! Artifact writing with sidecar manifests.
//!
//! Every command stages its outputs in memory and writes them through an
//! [`ArtifactWriter`], which records a SHA-256 digest per file and finally
//! emits `<command>.manifest.json` carrying the seed, the scale, a digest
//! of the resolved configuration, and the file list. Nothing in a manifest
//! depends on wall-clock time, so re-running a command with the same
//! configuration reproduces every byte, manifest included.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use oflow_core::{Error, Result};

use crate::config::Context;

#[derive(Debug, Serialize)]
struct FileEntry {
    /// Path relative to the output directory.
    path: String,
    sha256: String,
    bytes: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    seed: u64,
    scale: &'a str,
    /// SHA-256 of the resolved configuration JSON.
    config_sha256: &'a str,
    files: &'a [FileEntry],
}

/// SHA-256 digest, hex encoded.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of a resolved command configuration: the command name, run-wide
/// settings, and the command parameters, serialized canonically.
pub fn config_digest(command: &str, ctx: &Context, params: &impl Serialize) -> Result<String> {
    let doc = serde_json::json!({
        "command": command,
        "seed": ctx.seed,
        "scale": ctx.scale.name(),
        "params": params,
    });
    let bytes = serde_json::to_vec(&doc)
        .map_err(|e| Error::InvalidParameter(format!("config digest: {e}")))?;
    Ok(sha256_hex(&bytes))
}

/// Stages artifacts into an output directory and records their digests.
pub struct ArtifactWriter {
    out_dir: PathBuf,
    files: Vec<FileEntry>,
}

impl ArtifactWriter {
    pub fn new(out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(ArtifactWriter { out_dir: out_dir.to_path_buf(), files: Vec::new() })
    }

    /// Writes one artifact and records it for the manifest.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.out_dir.join(name), bytes)?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Serializes `value` as pretty JSON and writes it as an artifact.
    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| Error::InvalidParameter(format!("{name}: {e}")))?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    /// Writes the sidecar manifest and consumes the writer.
    pub fn finish(self, command: &str, ctx: &Context, params: &impl Serialize) -> Result<()> {
        let digest = config_digest(command, ctx, params)?;
        let manifest = Manifest {
            command,
            seed: ctx.seed,
            scale: ctx.scale.name(),
            config_sha256: &digest,
            files: &self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)
            .map_err(|e| Error::InvalidParameter(format!("manifest: {e}")))?;
        bytes.push(b'\n');
        fs::write(self.out_dir.join(format!("{command}.manifest.json")), bytes)?;
        Ok(())
    }
}

/// CSV rendered into memory so it can be hashed and written atomically.
pub fn csv_bytes<F>(build: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> Result<()>,
{
    let mut buf = Vec::new();
    let mut writer = csv::Writer::from_writer(&mut buf);
    build(&mut writer)?;
    writer.flush()?;
    drop(writer);
    Ok(buf)
}
