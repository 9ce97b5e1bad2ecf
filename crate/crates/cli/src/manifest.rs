use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Collects the files written by one pipeline run and records a content hash
/// for each, so outputs are verifiable and reruns are comparable byte for
/// byte.
pub struct OutputWriter {
    dir: PathBuf,
    outputs: Vec<OutputRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

impl OutputWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        let mut hasher = Sha256::new();
        hasher.update(contents.as_bytes());
        self.outputs.push(OutputRecord {
            path: name.to_string(),
            sha256: hex::encode(hasher.finalize()),
            bytes: contents.len(),
        });
        Ok(())
    }

    /// Writes the manifest itself (listing every previously written file) and
    /// returns the records.
    pub fn finish<T: Serialize>(mut self, summary: &T) -> Result<Vec<OutputRecord>, CliError> {
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            #[serde(flatten)]
            summary: &'a T,
            outputs: &'a [OutputRecord],
        }
        let manifest = Manifest {
            summary,
            outputs: &self.outputs,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(self.dir.join("manifest.json"), &json)?;
        self.outputs.push(OutputRecord {
            path: "manifest.json".into(),
            sha256: {
                let mut hasher = Sha256::new();
                hasher.update(json.as_bytes());
                hex::encode(hasher.finalize())
            },
            bytes: json.len(),
        });
        Ok(self.outputs)
    }
}
