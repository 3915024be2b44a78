use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed showmap record {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: edge {edge} appears more than once")]
    DuplicateEdge { line: usize, edge: u32 },
    #[error("line {line}: hit count for edge {edge} is zero")]
    ZeroHitCount { line: usize, edge: u32 },
    #[error("edge {edge} is outside the map (map size {map_size})")]
    EdgeOutOfRange { edge: u32, map_size: usize },

    #[error("bad trace magic {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported trace format version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated trace: expected {expected} payload bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("malformed trace: {0}")]
    Format(String),

    #[error("traces use mixed map sizes ({first} and {other})")]
    MixedMapSize { first: usize, other: usize },
    #[error("{traces} traces supplied for {seeds} seeds")]
    LengthMismatch { traces: usize, seeds: usize },
    #[error("seed {id} has no execution time")]
    MissingWeight { id: usize },
    #[error("seed {id} resolves to a non-positive weight")]
    NonPositiveWeight { id: usize },
    #[error("unknown seed id {0}")]
    UnknownRow(usize),

    #[error("manifest: {0}")]
    Manifest(String),
    #[error("no trace file for seed ids {ids:?}")]
    MissingTraces { ids: Vec<usize> },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix has no live rows")]
    EmptyMatrix,
    #[error("{rows} live rows exceeds the exact solver limit of {limit}")]
    RowLimit { rows: usize, limit: usize },
    #[error("seed {id} has no hit-count tuples; cmin requires showmap text traces")]
    MissingTuples { id: usize },
    #[error("cannot sample {k} of {n} seeds")]
    SampleSize { k: usize, n: usize },
    #[error("selection from {algo} does not preserve coverage")]
    Unverified { algo: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
