//! Run directories and their manifests.
//!
//! A run directory is created fresh for every mutating command and holds
//! exactly one `manifest.json`. Every input the command read is copied
//! into the directory and hashed, so a run can be checked later with
//! [`RunManifest::verify`].

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use time::macros::format_description;
use time::OffsetDateTime;

use crate::synthesis::now_rfc3339;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}: manifest is not valid JSON: {1}")]
    Manifest(PathBuf, serde_json::Error),
    #[error("{file}: hash mismatch (recorded {recorded}, found {found})")]
    HashMismatch { file: String, recorded: String, found: String },
    #[error("{0} already has a manifest")]
    Exists(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// One input file, recorded with the copy kept in the run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    /// Where the command read it from.
    pub source: String,
    /// File name inside the run directory.
    pub stored: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    /// Fully resolved configuration, defaults included.
    pub config: serde_json::Value,
    pub revision: String,
    pub started: String,
    pub finished: Option<String>,
    pub inputs: Vec<InputRecord>,
    /// Files the command produced, with their hashes.
    pub outputs: BTreeMap<String, String>,
}

/// Crate version plus the git commit of the working tree, when available.
pub fn source_revision() -> String {
    let version = env!("CARGO_PKG_VERSION");
    let git = std::process::Command::new("git")
        .args(["rev-parse", "--short=12", "HEAD"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string());
    match git {
        Some(rev) if !rev.is_empty() => format!("{version}+{rev}"),
        _ => version.to_string(),
    }
}

/// Creates `root/<game>_<mode>_<seed>_<timestamp>/`. A name that is taken
/// gets a numeric suffix; existing directories are never reused.
pub fn create_run_dir(root: &Path, game: &str, mode: &str, seed: u64) -> Result<PathBuf, RunError> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let stamp = OffsetDateTime::now_utc()
        .format(format_description!("[year][month][day]T[hour][minute][second]Z"))
        .expect("timestamp formats");
    let base = format!("{game}_{mode}_{seed}_{stamp}");
    for n in 0.. {
        let name = if n == 0 { base.clone() } else { format!("{base}-{n}") };
        let dir = root.join(name);
        match fs::create_dir(&dir) {
            Ok(()) => return Ok(dir),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(RunError::Io { path: dir, source: e }),
        }
    }
    unreachable!()
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, config: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            argv,
            config,
            revision: source_revision(),
            started: now_rfc3339(),
            finished: None,
            inputs: Vec::new(),
            outputs: BTreeMap::new(),
        }
    }

    /// Copies `source` into the run directory as `stored` and records its
    /// hash.
    pub fn add_input(&mut self, dir: &Path, source: &Path, stored: &str) -> Result<(), RunError> {
        let bytes = fs::read(source).map_err(io_err(source))?;
        let target = dir.join(stored);
        fs::write(&target, &bytes).map_err(io_err(&target))?;
        self.inputs.push(InputRecord {
            source: source.display().to_string(),
            stored: stored.to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes an output file into the run directory and records its hash.
    pub fn write_output(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<(), RunError> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, bytes).map_err(io_err(&path))?;
        self.outputs.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    /// Stamps the finish time and writes `manifest.json`; refuses to
    /// replace one that exists.
    pub fn finish(&mut self, dir: &Path) -> Result<(), RunError> {
        let path = dir.join(MANIFEST);
        if path.exists() {
            return Err(RunError::Exists(dir.to_path_buf()));
        }
        self.finished = Some(now_rfc3339());
        let json = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        fs::write(&path, json).map_err(io_err(&path))
    }

    pub fn open(dir: &Path) -> Result<Self, RunError> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|e| RunError::Manifest(path, e))
    }

    /// Re-hashes every recorded input copy and output.
    pub fn verify(&self, dir: &Path) -> Result<(), RunError> {
        let recorded = self.inputs.iter().map(|i| (&i.stored, &i.sha256)).chain(self.outputs.iter());
        for (file, hash) in recorded {
            let path = dir.join(file);
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            let found = sha256_hex(&bytes);
            if &found != hash {
                return Err(RunError::HashMismatch { file: file.clone(), recorded: hash.clone(), found });
            }
        }
        Ok(())
    }
}
