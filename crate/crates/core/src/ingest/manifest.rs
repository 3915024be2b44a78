use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SeedRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: usize,
    pub path: String,
    pub size_bytes: u64,
    pub exec_time_us: Option<u64>,
    pub sha256: String,
}

impl ManifestEntry {
    pub fn from_seed(seed: &SeedRecord) -> Self {
        Self {
            id: seed.id,
            path: seed.path.clone(),
            size_bytes: seed.size_bytes,
            exec_time_us: seed.exec_time_us,
            sha256: hex::encode(seed.content_hash),
        }
    }
}

/// The JSON seed index: an array of entries with contiguous ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn from_seeds(seeds: &[SeedRecord]) -> Self {
        Self {
            entries: seeds.iter().map(ManifestEntry::from_seed).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let mut paths = HashSet::new();
        for (pos, e) in self.entries.iter().enumerate() {
            if e.id != pos {
                return Err(Error::Manifest(format!(
                    "entry {pos} has id {}; ids must be contiguous from 0",
                    e.id
                )));
            }
            if !paths.insert(e.path.as_str()) {
                return Err(Error::Manifest(format!("duplicate path {:?}", e.path)));
            }
            if e.sha256.len() != 64 || !e.sha256.bytes().all(|b| b.is_ascii_hexdigit()) {
                return Err(Error::Manifest(format!(
                    "entry {} has a malformed sha256 {:?}",
                    e.id, e.sha256
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(text)?;
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("manifest serializes");
        out.push('\n');
        out
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::InFile {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn seeds(&self) -> Result<Vec<SeedRecord>> {
        self.entries
            .iter()
            .map(|e| {
                let mut content_hash = [0u8; 32];
                hex::decode_to_slice(&e.sha256, &mut content_hash)
                    .map_err(|err| Error::Manifest(format!("entry {}: {err}", e.id)))?;
                Ok(SeedRecord {
                    id: e.id,
                    path: e.path.clone(),
                    size_bytes: e.size_bytes,
                    exec_time_us: e.exec_time_us,
                    content_hash,
                })
            })
            .collect()
    }
}
