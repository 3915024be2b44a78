//! Trace ingestion: showmap text, binary bit-vector traces, the seed
//! manifest and raw corpus preprocessing.
//!
//! Trace directories hold one file per seed id, `<id>.showmap` for text and
//! `<id>.mlbv` for binary traces.

mod binary;
mod manifest;
mod prep;
mod showmap;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use binary::{decode_trace, encode_trace, read_trace, write_trace, MAGIC, VERSION};
pub use manifest::{Manifest, ManifestEntry};
pub use prep::{prep_corpus, PrepOutcome, DEFAULT_MAX_SIZE};
pub use showmap::{bucket, parse_showmap, render_showmap, to_trace, ShowmapRecord};

use crate::error::{Error, Result};
use crate::model::{CoverageTrace, SeedId};

pub const SHOWMAP_EXT: &str = "showmap";
pub const BINARY_EXT: &str = "mlbv";

pub fn trace_path(dir: &Path, id: SeedId, ext: &str) -> PathBuf {
    dir.join(format!("{id}.{ext}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    /// `<id>.mlbv` when present, otherwise `<id>.showmap`.
    PreferBinary,
    /// `<id>.showmap` only; keeps hit-count tuples.
    Text,
}

fn in_file(path: &Path) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::InFile {
        path: path.to_path_buf(),
        source: Box::new(e),
    }
}

pub fn read_showmap_file(path: &Path, map_size: usize) -> Result<CoverageTrace> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_showmap(&text)
        .and_then(|records| to_trace(&records, map_size))
        .map_err(in_file(path))
}

pub fn read_trace_file(path: &Path) -> Result<CoverageTrace> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_trace(&bytes).map_err(in_file(path))
}

/// Ids in `0..count` whose trace file is absent for the given source.
pub fn missing_traces(dir: &Path, count: usize, source: TraceSource) -> Vec<SeedId> {
    (0..count)
        .filter(|&id| {
            let text = trace_path(dir, id, SHOWMAP_EXT).is_file();
            match source {
                TraceSource::Text => !text,
                TraceSource::PreferBinary => !text && !trace_path(dir, id, BINARY_EXT).is_file(),
            }
        })
        .collect()
}

/// Loads traces for ids `0..count`, in id order. `map_size` applies to
/// showmap files; binary files carry their own width.
pub fn load_traces(
    dir: &Path,
    count: usize,
    map_size: usize,
    source: TraceSource,
) -> Result<Vec<CoverageTrace>> {
    let missing = missing_traces(dir, count, source);
    if !missing.is_empty() {
        return Err(Error::MissingTraces { ids: missing });
    }
    (0..count)
        .into_par_iter()
        .map(|id| {
            let binary = trace_path(dir, id, BINARY_EXT);
            if source == TraceSource::PreferBinary && binary.is_file() {
                read_trace_file(&binary)
            } else {
                read_showmap_file(&trace_path(dir, id, SHOWMAP_EXT), map_size)
            }
        })
        .collect()
}

/// Converts `<id>.showmap` files under `showmap_dir` into `<id>.mlbv` files
/// under `out_dir` for ids `0..count`.
pub fn convert_showmaps(
    showmap_dir: &Path,
    out_dir: &Path,
    count: usize,
    map_size: usize,
) -> Result<()> {
    let missing = missing_traces(showmap_dir, count, TraceSource::Text);
    if !missing.is_empty() {
        return Err(Error::MissingTraces { ids: missing });
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let traces: Vec<CoverageTrace> = (0..count)
        .into_par_iter()
        .map(|id| read_showmap_file(&trace_path(showmap_dir, id, SHOWMAP_EXT), map_size))
        .collect::<Result<_>>()?;
    traces.par_iter().enumerate().try_for_each(|(id, trace)| {
        let path = trace_path(out_dir, id, BINARY_EXT);
        fs::write(&path, encode_trace(trace)).map_err(|e| Error::io(&path, e))
    })
}
