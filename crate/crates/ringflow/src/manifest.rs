//! Run manifests: what was run, with which parameters, and digests of every
//! file it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const TOOL_VERSION: &str = concat!("ringflow ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_file(path: &Path) -> std::io::Result<(String, u64)> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    let mut total = 0u64;
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        total += n as u64;
    }
    Ok((hex::encode(hasher.finalize()), total))
}

/// Collects parameters and outputs while a command runs.
#[derive(Debug)]
pub struct ManifestBuilder {
    dir: PathBuf,
    command: String,
    parameters: BTreeMap<String, Value>,
    outputs: Vec<PathBuf>,
    started: String,
    clock: Instant,
}

impl ManifestBuilder {
    pub fn new(dir: &Path, command: &str) -> Self {
        Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            parameters: BTreeMap::new(),
            outputs: Vec::new(),
            started: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            clock: Instant::now(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.parameters.insert(key.to_string(), v);
        self
    }

    /// Path for an output file inside the run directory, recorded for digesting.
    pub fn output(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        if !self.outputs.contains(&p) {
            self.outputs.push(p.clone());
        }
        p
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Digests every recorded output and writes `<command>.manifest.json`.
    pub fn finish(self) -> CliResult<(PathBuf, RunManifest)> {
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for p in &self.outputs {
            let (sha256, bytes) = sha256_file(p).map_err(|e| CliError::output(p, e))?;
            let rel = p.strip_prefix(&self.dir).unwrap_or(p);
            outputs.push(OutputDigest { path: rel.to_string_lossy().into_owned(), sha256, bytes });
        }
        let manifest = RunManifest {
            command: self.command.clone(),
            parameters: self.parameters,
            tool_version: TOOL_VERSION.to_string(),
            started: self.started,
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            wall_time_seconds: self.clock.elapsed().as_secs_f64(),
            outputs,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, text + "\n").map_err(|e| CliError::output(&path, e))?;
        Ok((path, manifest))
    }
}

/// One way a recorded output can disagree with its manifest.
#[derive(Debug, Clone, PartialEq)]
pub enum DigestMismatch {
    Missing(String),
    Changed { path: String, expected: String, found: String },
}

/// Re-digests every output named in a manifest file. An empty list means
/// every file exists and matches.
pub fn verify_manifest(path: &Path) -> CliResult<Vec<DigestMismatch>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::MissingInput { path: path.to_path_buf(), source: e })?;
    let manifest: RunManifest = serde_json::from_str(&text)
        .map_err(|e| CliError::BadInput { path: path.to_path_buf(), reason: e.to_string() })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut bad = Vec::new();
    for out in &manifest.outputs {
        match sha256_file(&dir.join(&out.path)) {
            Ok((digest, _)) if digest == out.sha256 => {}
            Ok((digest, _)) => bad.push(DigestMismatch::Changed {
                path: out.path.clone(),
                expected: out.sha256.clone(),
                found: digest,
            }),
            Err(_) => bad.push(DigestMismatch::Missing(out.path.clone())),
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        fs::write(&p, b"abc").unwrap();
        let (d, n) = sha256_file(&p).unwrap();
        assert_eq!(d, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(n, 3);
    }

    #[test]
    fn manifest_round_trip_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let mut b = ManifestBuilder::new(dir.path(), "demo");
        b.param("alpha", 1.5).param("schedule", [1, 2, 3]);
        let out = b.output("a.csv");
        fs::write(&out, "x,y\n1,2\n").unwrap();
        let (path, m) = b.finish().unwrap();
        assert_eq!(m.outputs.len(), 1);
        assert_eq!(m.outputs[0].path, "a.csv");
        assert!(verify_manifest(&path).unwrap().is_empty());

        fs::write(&out, "x,y\n1,3\n").unwrap();
        assert!(matches!(verify_manifest(&path).unwrap()[0], DigestMismatch::Changed { .. }));
        fs::remove_file(&out).unwrap();
        assert_eq!(verify_manifest(&path).unwrap(), vec![DigestMismatch::Missing("a.csv".into())]);
    }
}
