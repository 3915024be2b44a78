//! Raw corpus preprocessing: size cutoff and content-hash deduplication.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use super::manifest::{Manifest, ManifestEntry};
use crate::error::{Error, Result};

/// 300 KiB.
pub const DEFAULT_MAX_SIZE: u64 = 300 * 1024;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrepOutcome {
    pub manifest: Manifest,
    pub duplicates: usize,
    pub oversize: usize,
    pub unreadable: usize,
}

enum Scanned {
    Kept { size: u64, hash: [u8; 32] },
    Oversize,
    Unreadable,
}

fn scan(path: &Path, max_size_bytes: u64) -> Scanned {
    let Ok(meta) = fs::metadata(path) else {
        return Scanned::Unreadable;
    };
    if meta.len() > max_size_bytes {
        return Scanned::Oversize;
    }
    match fs::read(path) {
        Ok(bytes) => Scanned::Kept {
            size: bytes.len() as u64,
            hash: Sha256::digest(&bytes).into(),
        },
        Err(_) => Scanned::Unreadable,
    }
}

/// Lists regular files under `input_dir`, drops those above
/// `max_size_bytes`, and keeps the first file in path order for each
/// distinct content hash. Ids follow sorted path order.
pub fn prep_corpus(input_dir: &Path, max_size_bytes: u64) -> Result<PrepOutcome> {
    fs::read_dir(input_dir).map_err(|e| Error::io(input_dir, e))?;

    let mut outcome = PrepOutcome::default();
    let mut paths: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(input_dir).min_depth(1) {
        match entry {
            Ok(e) if e.file_type().is_file() => paths.push(e.into_path()),
            Ok(_) => {}
            Err(_) => outcome.unreadable += 1,
        }
    }
    let mut paths: Vec<(String, PathBuf)> = paths
        .into_iter()
        .map(|p| (p.to_string_lossy().into_owned(), p))
        .collect();
    paths.sort();

    let scanned: Vec<Scanned> = paths
        .par_iter()
        .map(|(_, p)| scan(p, max_size_bytes))
        .collect();

    let mut seen = HashSet::new();
    for ((display, _), result) in paths.into_iter().zip(scanned) {
        match result {
            Scanned::Kept { size, hash } => {
                if seen.insert(hash) {
                    outcome.manifest.entries.push(ManifestEntry {
                        id: outcome.manifest.entries.len(),
                        path: display,
                        size_bytes: size,
                        exec_time_us: None,
                        sha256: hex::encode(hash),
                    });
                } else {
                    outcome.duplicates += 1;
                }
            }
            Scanned::Oversize => outcome.oversize += 1,
            Scanned::Unreadable => {
                log::warn!("skipping unreadable file {display}");
                outcome.unreadable += 1;
            }
        }
    }
    Ok(outcome)
}
