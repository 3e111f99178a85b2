use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_SCHEMA: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct GraphDescriptor {
    pub path: String,
    pub sha256: String,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to replay a run; no timestamps, so replays are
/// byte-identical.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub graph: Option<GraphDescriptor>,
    pub seeds: Vec<u64>,
    pub params: BTreeMap<String, Value>,
    pub outputs: Vec<OutputRecord>,
}

pub struct Run {
    manifest: RunManifest,
    manifest_path: Option<PathBuf>,
}

impl Run {
    pub fn new(command: &str, args: Vec<String>, manifest_path: Option<PathBuf>) -> Self {
        Self {
            manifest: RunManifest {
                schema_version: MANIFEST_SCHEMA,
                tool: "msflab",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                args,
                graph: None,
                seeds: Vec::new(),
                params: BTreeMap::new(),
                outputs: Vec::new(),
            },
            manifest_path,
        }
    }

    pub fn graph(&mut self, path: &Path, bytes: &[u8], vertices: usize, edges: usize) {
        self.manifest.graph = Some(GraphDescriptor {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
            vertices,
            edges,
        });
    }

    pub fn seed(&mut self, seed: u64) {
        if !self.manifest.seeds.contains(&seed) {
            self.manifest.seeds.push(seed);
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.manifest.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameters serialize"),
        );
    }

    /// Writes `text` to `path`, or to stdout when there is no path.
    pub fn emit(&mut self, path: Option<&Path>, text: &str) -> Result<(), CliError> {
        match path {
            Some(p) => {
                std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                if self.manifest_path.is_none() {
                    let mut m = p.as_os_str().to_owned();
                    m.push(".manifest.json");
                    self.manifest_path = Some(PathBuf::from(m));
                }
                self.manifest.outputs.push(OutputRecord {
                    path: p.display().to_string(),
                    sha256: sha256_hex(text.as_bytes()),
                });
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
                self.manifest.outputs.push(OutputRecord {
                    path: "-".into(),
                    sha256: sha256_hex(text.as_bytes()),
                });
            }
        }
        Ok(())
    }

    /// Writes the manifest if a destination is known.
    pub fn finish(self) -> Result<(), CliError> {
        if let Some(p) = &self.manifest_path {
            let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes") + "\n";
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }
}
