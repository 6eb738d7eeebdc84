use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Written next to every output; enough to re-run the command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, as given.
    pub argv: Vec<String>,
    /// `MRK_*` variables set when the command ran.
    pub env: BTreeMap<String, String>,
    /// Every parameter after defaults and environment overrides.
    pub params: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub version: String,
    pub timings: Vec<Timing>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Writes through a temporary file in the target directory, renamed into
/// place once complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path().to_path_buf(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Collects inputs, outputs and timings of one command; nothing touches the
/// file system until [`Run::finish`].
pub struct Run {
    manifest: RunManifest,
    pending: Vec<(PathBuf, Vec<u8>)>,
    manifest_path: Option<PathBuf>,
}

impl Run {
    pub fn new(command: &str, argv: Vec<String>, env: BTreeMap<String, String>) -> Self {
        Run {
            manifest: RunManifest {
                command: command.to_string(),
                argv,
                env,
                params: serde_json::Value::Null,
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
                seed: None,
                version: env!("CARGO_PKG_VERSION").to_string(),
                timings: Vec::new(),
            },
            pending: Vec::new(),
            manifest_path: None,
        }
    }

    pub fn params(&mut self, params: impl Serialize) {
        self.manifest.params = serde_json::to_value(params).expect("parameters serialize");
    }

    pub fn set_param(&mut self, key: &str, value: impl Serialize) {
        if let serde_json::Value::Object(m) = &mut self.manifest.params {
            m.insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
        }
    }

    pub fn seed(&mut self, seed: u64) {
        self.manifest.seed = Some(seed);
    }

    /// Reads an input file and records its digest.
    pub fn input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = read(path)?;
        self.manifest
            .inputs
            .insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    /// Records the digest of a file read by a loader.
    pub fn note_input(&mut self, path: &Path) -> Result<()> {
        self.input(path).map(|_| ())
    }

    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let seconds = start.elapsed().as_secs_f64();
        info!("{name}: {seconds:.2}s");
        self.manifest.timings.push(Timing {
            stage: name.to_string(),
            seconds,
        });
        out
    }

    pub fn output(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.pending.push((path, bytes));
    }

    pub fn manifest_at(&mut self, path: PathBuf) {
        self.manifest_path = Some(path);
    }

    /// Writes every output, then the manifest.
    pub fn finish(mut self) -> Result<RunManifest> {
        for (path, bytes) in &self.pending {
            write_atomic(path, bytes)?;
            self.manifest
                .outputs
                .insert(path.display().to_string(), sha256_hex(bytes));
            info!("wrote {}", path.display());
        }
        if let Some(p) = &self.manifest_path {
            let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
            write_atomic(p, text.as_bytes())?;
        }
        Ok(self.manifest)
    }
}

/// Manifest path for a single-file output.
pub fn manifest_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}
