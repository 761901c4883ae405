//! Atomic output files and the run manifest written next to them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub parameters: BTreeMap<String, Value>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp: u64,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_owned(),
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp: timestamp(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_owned(), value.into());
        self
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            path: path.to_owned(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Path of the manifest that accompanies `output`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        })
}

/// Where a command's results go: stdout, or files plus a manifest.
pub struct Sink {
    primary: Option<PathBuf>,
    files: Vec<(PathBuf, Vec<u8>)>,
    stdout: Vec<u8>,
}

impl Sink {
    pub fn new(output: Option<PathBuf>) -> Self {
        Sink {
            primary: output,
            files: Vec::new(),
            stdout: Vec::new(),
        }
    }

    pub fn primary(&self) -> Option<&Path> {
        self.primary.as_deref()
    }

    /// Queues the main result: a file when an output path was given,
    /// otherwise stdout.
    pub fn emit(&mut self, contents: impl Into<Vec<u8>>) {
        let contents = contents.into();
        match &self.primary {
            Some(p) => self.files.push((p.clone(), contents)),
            None => self.stdout.extend(contents),
        }
    }

    /// Queues an additional file; ignored when writing to stdout.
    pub fn companion(&mut self, path: PathBuf, contents: impl Into<Vec<u8>>) {
        if self.primary.is_some() {
            self.files.push((path, contents.into()));
        }
    }

    pub fn finish(self, mut manifest: Manifest) -> Result<(), CliError> {
        if self.primary.is_none() {
            std::io::stdout()
                .write_all(&self.stdout)
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
            return Ok(());
        }
        for (path, bytes) in &self.files {
            write_atomic(path, bytes)?;
            manifest.outputs.push(FileDigest {
                path: path.display().to_string(),
                sha256: sha256_hex(bytes),
            });
        }
        let primary = self.primary.expect("checked above");
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&Manifest::path_for(&primary), text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_next_to_output() {
        assert_eq!(
            Manifest::path_for(Path::new("out/matrix.csv")),
            PathBuf::from("out/matrix.csv.manifest.json")
        );
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
