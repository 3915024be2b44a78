//! Seeds, coverage traces, weights and the reducible coverage matrix.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

/// Dense index of a seed within one corpus.
pub type SeedId = usize;

/// Column index into the edge space.
pub type EdgeId = usize;

pub const DEFAULT_MAP_SIZE: usize = 65536;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedRecord {
    pub id: SeedId,
    pub path: String,
    pub size_bytes: u64,
    pub exec_time_us: Option<u64>,
    pub content_hash: [u8; 32],
}

impl SeedRecord {
    /// A record with no backing file, for synthetic corpora and tests.
    pub fn synthetic(id: SeedId, size_bytes: u64) -> Self {
        Self {
            id,
            path: format!("seed-{id:06}"),
            size_bytes,
            exec_time_us: None,
            content_hash: [0; 32],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    #[serde(alias = "none")]
    Unweighted,
    Size,
    Time,
}

impl WeightScheme {
    pub fn is_weighted(self) -> bool {
        !matches!(self, WeightScheme::Unweighted)
    }

    pub fn resolve(self, seed: &SeedRecord) -> Result<u64> {
        let weight = match self {
            WeightScheme::Unweighted => 1,
            WeightScheme::Size => seed.size_bytes,
            WeightScheme::Time => seed
                .exec_time_us
                .ok_or(Error::MissingWeight { id: seed.id })?,
        };
        if weight == 0 {
            return Err(Error::NonPositiveWeight { id: seed.id });
        }
        Ok(weight)
    }
}

/// One `(edge, hit-count bucket)` pair, the unit of coverage for cmin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeTuple {
    pub edge: u32,
    pub bucket: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageTrace {
    pub bits: BitSet,
    pub tuples: Option<BTreeSet<EdgeTuple>>,
}

impl CoverageTrace {
    pub fn empty(map_size: usize) -> Self {
        Self {
            bits: BitSet::new(map_size),
            tuples: None,
        }
    }

    pub fn from_edges<I: IntoIterator<Item = EdgeId>>(map_size: usize, edges: I) -> Self {
        Self {
            bits: BitSet::from_indices(map_size, edges),
            tuples: None,
        }
    }

    pub fn map_size(&self) -> usize {
        self.bits.len()
    }

    pub fn popcount(&self) -> usize {
        self.bits.count_ones()
    }
}

/// The N×M boolean seed/edge matrix with per-row weights.
///
/// Bit data is fixed at construction. Reductions only shrink the live row
/// and column sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageMatrix {
    rows: Vec<BitSet>,
    weights: Vec<u64>,
    n_cols: usize,
    live_rows: BitSet,
    live_cols: BitSet,
    dropped_singular_rows: Vec<SeedId>,
}

impl CoverageMatrix {
    /// Builds a matrix from raw rows and already-resolved weights. Rows with
    /// no set bit are dropped from the live set and recorded.
    pub fn from_rows(n_cols: usize, rows: Vec<BitSet>, weights: Vec<u64>) -> Result<Self> {
        if rows.len() != weights.len() {
            return Err(Error::LengthMismatch {
                traces: rows.len(),
                seeds: weights.len(),
            });
        }
        for (id, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::MixedMapSize {
                    first: n_cols,
                    other: row.len(),
                });
            }
            if weights[id] == 0 {
                return Err(Error::NonPositiveWeight { id });
            }
        }
        let mut live_rows = BitSet::new(rows.len());
        let mut dropped = Vec::new();
        for (id, row) in rows.iter().enumerate() {
            if row.none() {
                dropped.push(id);
            } else {
                live_rows.insert(id);
            }
        }
        Ok(Self {
            live_cols: BitSet::full(n_cols),
            rows,
            weights,
            n_cols,
            live_rows,
            dropped_singular_rows: dropped,
        })
    }

    /// Convenience constructor from 0/1 rows, used heavily by fixtures.
    pub fn from_dense(dense: &[&[u8]], weights: &[u64]) -> Result<Self> {
        let n_cols = dense.first().map_or(0, |r| r.len());
        let rows = dense
            .iter()
            .map(|r| {
                BitSet::from_indices(
                    r.len(),
                    r.iter()
                        .enumerate()
                        .filter(|(_, &b)| b != 0)
                        .map(|(j, _)| j),
                )
            })
            .collect();
        Self::from_rows(n_cols, rows, weights.to_vec())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, id: SeedId) -> &BitSet {
        &self.rows[id]
    }

    pub fn rows(&self) -> &[BitSet] {
        &self.rows
    }

    pub fn weight(&self, id: SeedId) -> u64 {
        self.weights[id]
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn live_rows(&self) -> impl Iterator<Item = SeedId> + '_ {
        self.live_rows.iter()
    }

    pub fn live_cols(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.live_cols.iter()
    }

    pub fn live_row_set(&self) -> &BitSet {
        &self.live_rows
    }

    pub fn live_col_set(&self) -> &BitSet {
        &self.live_cols
    }

    pub fn live_row_count(&self) -> usize {
        self.live_rows.count_ones()
    }

    pub fn live_col_count(&self) -> usize {
        self.live_cols.count_ones()
    }

    pub fn is_row_live(&self, id: SeedId) -> bool {
        self.live_rows.contains(id)
    }

    pub fn is_col_live(&self, col: EdgeId) -> bool {
        self.live_cols.contains(col)
    }

    pub fn dropped_singular_rows(&self) -> &[SeedId] {
        &self.dropped_singular_rows
    }

    pub fn remove_rows<I: IntoIterator<Item = SeedId>>(&mut self, rows: I) {
        for r in rows {
            self.live_rows.remove(r);
        }
    }

    pub fn remove_cols<I: IntoIterator<Item = EdgeId>>(&mut self, cols: I) {
        for c in cols {
            self.live_cols.remove(c);
        }
    }

    /// A row's coverage restricted to live columns.
    pub fn live_row(&self, id: SeedId) -> BitSet {
        let mut bits = self.rows[id].clone();
        bits.intersect_with(&self.live_cols);
        bits
    }

    /// Live columns that at least one live row covers.
    pub fn coverable_cols(&self) -> BitSet {
        let mut union = BitSet::new(self.n_cols);
        for r in self.live_rows() {
            union.union_with(&self.rows[r]);
        }
        union.intersect_with(&self.live_cols);
        union
    }
}

pub fn build_matrix(
    traces: &[CoverageTrace],
    seeds: &[SeedRecord],
    scheme: WeightScheme,
) -> Result<CoverageMatrix> {
    if traces.len() != seeds.len() {
        return Err(Error::LengthMismatch {
            traces: traces.len(),
            seeds: seeds.len(),
        });
    }
    let map_size = traces.first().map_or(DEFAULT_MAP_SIZE, |t| t.map_size());
    if let Some(t) = traces.iter().find(|t| t.map_size() != map_size) {
        return Err(Error::MixedMapSize {
            first: map_size,
            other: t.map_size(),
        });
    }
    for (pos, seed) in seeds.iter().enumerate() {
        if seed.id != pos {
            return Err(Error::Manifest(format!(
                "seed at position {pos} has id {}; ids must be contiguous from 0",
                seed.id
            )));
        }
    }
    let weights = seeds
        .iter()
        .map(|s| scheme.resolve(s))
        .collect::<Result<Vec<_>>>()?;
    let rows = traces.iter().map(|t| t.bits.clone()).collect();
    CoverageMatrix::from_rows(map_size, rows, weights)
}

/// Bitwise OR of the named rows' full coverage.
pub fn union_coverage(matrix: &CoverageMatrix, row_ids: &BTreeSet<SeedId>) -> Result<BitSet> {
    let mut union = BitSet::new(matrix.n_cols());
    for &r in row_ids {
        if r >= matrix.n_rows() {
            return Err(Error::UnknownRow(r));
        }
        union.union_with(matrix.row(r));
    }
    Ok(union)
}

/// Sorts seeds by path and reassigns ids `0..n` in that order, carrying each
/// seed's trace along.
pub fn canonicalize(
    mut entries: Vec<(SeedRecord, CoverageTrace)>,
) -> (Vec<SeedRecord>, Vec<CoverageTrace>) {
    entries.sort_by(|a, b| a.0.path.cmp(&b.0.path));
    entries
        .into_iter()
        .enumerate()
        .map(|(id, (mut seed, trace))| {
            seed.id = id;
            (seed, trace)
        })
        .unzip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    ColSingularity,
    RowSingularity,
    ExoticRow,
    DominantRowDelete,
    DominantColDelete,
    HeuristicRow,
}

/// One audited matrix operation. All id lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub rows_removed: Vec<SeedId>,
    pub cols_removed: Vec<EdgeId>,
    pub rows_selected: Vec<SeedId>,
    pub cost_delta: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub chosen: BTreeSet<SeedId>,
    pub total_weight: u64,
    pub heuristic_cost: u64,
    pub steps: Vec<ReductionStep>,
    pub dropped_singular_rows: Vec<SeedId>,
}

impl Selection {
    /// A selection with no reduction history; `total_weight` sums `weight`.
    pub fn from_chosen<F: Fn(SeedId) -> u64>(chosen: BTreeSet<SeedId>, weight: F) -> Self {
        let total_weight = chosen.iter().map(|&id| weight(id)).sum();
        Self {
            chosen,
            total_weight,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn step_count(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }

    pub fn step_kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }
}
