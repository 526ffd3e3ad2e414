use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Written next to every output file as `<file>.manifest.json`. Running
/// `dope` again with `argv` reproduces the file byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_seconds: f64,
    pub output_sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Writes `body` to `out` and its manifest beside it.
pub fn write_with_manifest(out: &Path, body: &str, mut manifest: RunManifest) -> std::io::Result<()> {
    manifest.output_sha256 = sha256_hex(body.as_bytes());
    fs::write(out, body)?;
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(manifest_path(out), json + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(manifest_path(Path::new("out/gap.csv")), PathBuf::from("out/gap.csv.manifest.json"));
    }
}
