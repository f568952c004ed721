//! Run manifests: every file the CLI writes gets a `<file>.manifest.json`
//! sidecar binding it to the command line, input digest, seed and toolkit
//! version.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Sidecar contents.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Reconstructed command line.
    pub command: String,
    /// Digest of the governing config or primary input.
    pub config_digest: String,
    /// Seed in effect (0 when the command uses no randomness).
    pub seed: u64,
    /// Crate version.
    pub toolkit_version: &'static str,
    /// Wall-clock creation time, milliseconds since the Unix epoch.
    pub created_unix_ms: u128,
}

impl RunManifest {
    /// Captures the current process invocation.
    pub fn capture(config_digest: String, seed: u64) -> Self {
        let command: Vec<String> = std::env::args().collect();
        Self {
            command: command.join(" "),
            config_digest,
            seed,
            toolkit_version: env!("CARGO_PKG_VERSION"),
            created_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
        }
    }

    /// Writes the sidecar next to `output`; returns the sidecar path.
    pub fn write_sidecar(&self, output: &Path) -> std::io::Result<PathBuf> {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        let path = output.with_file_name(name);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// SHA-256 digest of a file's bytes, `sha256:<hex>`.
pub fn digest_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    Ok(digest_bytes(&bytes))
}

/// SHA-256 digest of a byte slice, `sha256:<hex>`.
pub fn digest_bytes(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn sidecar_lands_next_to_the_output() {
        let dir = tempdir().unwrap();
        let out = dir.path().join("curve.csv");
        fs::write(&out, "x\n").unwrap();
        let manifest = RunManifest::capture(digest_file(&out).unwrap(), 7);
        let side = manifest.write_sidecar(&out).unwrap();
        assert_eq!(side, dir.path().join("curve.csv.manifest.json"));
        let text = fs::read_to_string(side).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["seed"], 7);
        assert!(v["config_digest"].as_str().unwrap().starts_with("sha256:"));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            digest_bytes(b"abc"),
            "sha256:ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
