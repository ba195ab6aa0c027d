//! Run manifests: parameters, timestamps and SHA-256 digests of every output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct OutputFile {
    /// Path relative to the manifest directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Complete,
    Partial,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub started: String,
    pub finished: Option<String>,
    pub status: RunStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<OutputFile>,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = fs::read(path)?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

/// Writes `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Config(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Collects outputs of a run rooted at one directory.
#[derive(Debug)]
pub struct ManifestBuilder {
    root: PathBuf,
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn new(root: &Path, command: &str, config: BTreeMap<String, String>, seed: Option<u64>) -> Self {
        Self {
            root: root.to_path_buf(),
            manifest: RunManifest {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config,
                seed,
                started: now(),
                finished: None,
                status: RunStatus::Partial,
                error: None,
                outputs: Vec::new(),
            },
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Records a file that already exists under the root.
    pub fn add(&mut self, path: &Path) -> Result<()> {
        let (sha256, bytes) = sha256_file(path)?;
        let rel = path.strip_prefix(&self.root).unwrap_or(path);
        let rel = rel.to_string_lossy().replace('\\', "/");
        self.manifest.outputs.retain(|o| o.path != rel);
        self.manifest.outputs.push(OutputFile { path: rel, sha256, bytes });
        Ok(())
    }

    pub fn finish(mut self) -> Result<RunManifest> {
        self.manifest.status = RunStatus::Complete;
        self.manifest.finished = Some(now());
        self.write()?;
        Ok(self.manifest)
    }

    /// Records the failure and writes the manifest marked partial.
    pub fn abort(mut self, err: &Error) -> RunManifest {
        self.manifest.status = RunStatus::Partial;
        self.manifest.finished = Some(now());
        self.manifest.error = Some(err.to_string());
        if let Err(e) = self.write() {
            log::error!("could not write partial manifest: {e}");
        }
        self.manifest
    }

    fn write(&self) -> Result<()> {
        let json = serde_json::to_vec_pretty(&self.manifest).map_err(|e| Error::Corrupt(e.to_string()))?;
        write_atomic(&self.root.join(MANIFEST_NAME), &json)
    }
}

pub fn read_manifest(path: &Path) -> Result<RunManifest> {
    let bytes = fs::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Corrupt(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Missing(String),
    Digest(String),
}

/// Re-hashes every listed output. Returns the mismatches, if any.
pub fn verify(path: &Path) -> Result<Vec<Mismatch>> {
    let m = read_manifest(path)?;
    let root = path.parent().unwrap_or(Path::new("."));
    let mut bad = Vec::new();
    for o in &m.outputs {
        let p = root.join(&o.path);
        match sha256_file(&p) {
            Ok((d, n)) if d == o.sha256 && n == o.bytes => {}
            Ok(_) => bad.push(Mismatch::Digest(o.path.clone())),
            Err(_) => bad.push(Mismatch::Missing(o.path.clone())),
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_string() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc.txt");
        fs::write(&p, b"abc").unwrap();
        let (d, n) = sha256_file(&p).unwrap();
        assert_eq!(d, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(n, 3);
    }

    #[test]
    fn manifest_roundtrip_and_verify() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a.csv");
        fs::write(&out, "x\n1\n").unwrap();
        let mut b = ManifestBuilder::new(dir.path(), "simulate", BTreeMap::new(), Some(3));
        b.add(&out).unwrap();
        let m = b.finish().unwrap();
        let mpath = dir.path().join(MANIFEST_NAME);
        assert_eq!(read_manifest(&mpath).unwrap(), m);
        assert_eq!(m.outputs[0].path, "a.csv");
        assert!(verify(&mpath).unwrap().is_empty());
        fs::write(&out, "x\n2\n").unwrap();
        assert_eq!(verify(&mpath).unwrap(), vec![Mismatch::Digest("a.csv".into())]);
        fs::remove_file(&out).unwrap();
        assert_eq!(verify(&mpath).unwrap(), vec![Mismatch::Missing("a.csv".into())]);
    }

    #[test]
    fn aborted_run_is_marked_partial() {
        let dir = tempfile::tempdir().unwrap();
        let b = ManifestBuilder::new(dir.path(), "bps", BTreeMap::new(), None);
        let m = b.abort(&Error::Config("boom".into()));
        assert_eq!(m.status, RunStatus::Partial);
        let back = read_manifest(&dir.path().join(MANIFEST_NAME)).unwrap();
        assert_eq!(back.status, RunStatus::Partial);
        assert!(back.error.unwrap().contains("boom"));
        assert!(!dir.path().join(".manifest.json.tmp").exists());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn digests_verify_for_any_contents(files in proptest::collection::vec(proptest::collection::vec(proptest::prelude::any::<u8>(), 0..512), 1..5)) {
            let dir = tempfile::tempdir().unwrap();
            let mut b = ManifestBuilder::new(dir.path(), "t", BTreeMap::new(), None);
            for (i, bytes) in files.iter().enumerate() {
                let p = dir.path().join(format!("f{i}.bin"));
                fs::write(&p, bytes).unwrap();
                b.add(&p).unwrap();
            }
            let m = b.finish().unwrap();
            proptest::prop_assert_eq!(m.outputs.len(), files.len());
            proptest::prop_assert!(verify(&dir.path().join(MANIFEST_NAME)).unwrap().is_empty());
        }
    }
}
