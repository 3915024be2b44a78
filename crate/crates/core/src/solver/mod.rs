//! MoonLight: dynamic-programming reduction of the coverage matrix.
//!
//! Each recursion level applies the first applicable operation family, in
//! this order:
//!
//! 1. singularities (zero columns, then zero rows) are removed;
//! 2. exotic rows, the sole cover of some column, are selected together
//!    with every column they cover;
//! 3. submissive rows are deleted;
//! 4. dominant columns are deleted;
//! 5. otherwise the heuristic row is selected with its columns, at a cost of
//!    its weight (1 when unweighted).
//!
//! Families 1-4 are cost-free: an optimum of the reduced matrix, plus the
//! forced exotic rows, is an optimum of the original. A run that finishes
//! with zero heuristic cost is therefore an exact minimum cover.
//!
//! A row is submissive when another live row covers a superset of its live
//! columns at no greater weight. Among rows with identical coverage the
//! lightest one, then the lowest id, survives. A column is dominant when it
//! strictly contains another live column; among identical columns all but
//! the lowest id are dominant.

mod reducer;

use std::collections::BTreeSet;

use reducer::Reducer;

use crate::error::{Error, Result};
use crate::model::{
    CoverageMatrix, EdgeId, ReductionStep, SeedId, Selection, StepKind, WeightScheme,
};

/// Ties are always broken towards the lowest id; it is the only policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverConfig {
    pub scheme: WeightScheme,
    pub tie_break: TieBreak,
    /// When false, steps are still logged with their kind and cost but
    /// without row and column lists.
    pub record_steps: bool,
}

impl SolverConfig {
    pub fn new(scheme: WeightScheme) -> Self {
        Self {
            scheme,
            tie_break: TieBreak::LowestId,
            record_steps: true,
        }
    }
}

pub fn find_column_singularities(matrix: &CoverageMatrix) -> Vec<EdgeId> {
    let red = Reducer::from_matrix(matrix, false);
    red.col_ids(&red.singular_cols())
}

pub fn find_row_singularities(matrix: &CoverageMatrix) -> Vec<SeedId> {
    let red = Reducer::from_matrix(matrix, false);
    red.row_ids(&red.singular_rows())
}

pub fn find_exotic_rows(matrix: &CoverageMatrix) -> Vec<SeedId> {
    let red = Reducer::from_matrix(matrix, false);
    red.row_ids(&red.exotic_rows())
}

pub fn find_submissive_rows(matrix: &CoverageMatrix, scheme: WeightScheme) -> Vec<SeedId> {
    let mut red = Reducer::from_matrix(matrix, scheme.is_weighted());
    let rows = red.submissive_rows(false);
    red.row_ids(&rows)
}

pub fn find_dominant_columns(matrix: &CoverageMatrix) -> Vec<EdgeId> {
    let mut red = Reducer::from_matrix(matrix, false);
    let cols = red.dominant_cols(false);
    red.col_ids(&cols)
}

/// Live columns covered by any of `rows`. Rows that are not live are
/// ignored.
pub fn contained_columns(matrix: &CoverageMatrix, rows: &BTreeSet<SeedId>) -> Vec<EdgeId> {
    let red = Reducer::from_matrix(matrix, false);
    let local: Vec<usize> = rows.iter().filter_map(|&r| red.local_row(r)).collect();
    red.col_ids(&red.contained_cols(&local))
}

pub fn heuristic_row(matrix: &CoverageMatrix, scheme: WeightScheme) -> Result<SeedId> {
    let red = Reducer::from_matrix(matrix, scheme.is_weighted());
    let r = red.heuristic_row().ok_or(Error::EmptyMatrix)?;
    Ok(red.row_ids(&[r])[0])
}

struct Log {
    record: bool,
    steps: Vec<ReductionStep>,
}

impl Log {
    fn push(
        &mut self,
        kind: StepKind,
        rows_removed: impl FnOnce() -> Vec<SeedId>,
        cols_removed: impl FnOnce() -> Vec<EdgeId>,
        rows_selected: impl FnOnce() -> Vec<SeedId>,
        cost_delta: u64,
    ) {
        let step = if self.record {
            ReductionStep {
                kind,
                rows_removed: rows_removed(),
                cols_removed: cols_removed(),
                rows_selected: rows_selected(),
                cost_delta,
            }
        } else {
            ReductionStep {
                kind,
                rows_removed: Vec::new(),
                cols_removed: Vec::new(),
                rows_selected: Vec::new(),
                cost_delta,
            }
        };
        self.steps.push(step);
    }
}

/// Runs MoonLight to completion on the live part of `matrix`.
///
/// The returned selection covers every live column that some live row
/// covers. Selected rows appear in their step's `rows_selected`, not in
/// `rows_removed`.
pub fn moonlight_distill(matrix: &CoverageMatrix, config: &SolverConfig) -> Selection {
    let weighted = config.scheme.is_weighted();
    let mut red = Reducer::from_matrix(matrix, weighted);
    let mut log = Log {
        record: config.record_steps,
        steps: Vec::new(),
    };
    let mut chosen = BTreeSet::new();
    let mut total_weight = 0u64;
    let mut heuristic_cost = 0u64;

    while red.n_live_cols() > 0 {
        red.maybe_compact();

        let cols = red.singular_cols();
        if !cols.is_empty() {
            log.push(
                StepKind::ColSingularity,
                Vec::new,
                || red.col_ids(&cols),
                Vec::new,
                0,
            );
            red.remove_cols(&cols);
            continue;
        }

        let rows = red.singular_rows();
        if !rows.is_empty() {
            log.push(
                StepKind::RowSingularity,
                || red.row_ids(&rows),
                Vec::new,
                Vec::new,
                0,
            );
            red.remove_rows(&rows);
            continue;
        }

        let rows = red.exotic_rows();
        if !rows.is_empty() {
            let cols = red.contained_cols(&rows);
            let ids = red.row_ids(&rows);
            for &r in &rows {
                total_weight += red.weight(r);
            }
            log.push(
                StepKind::ExoticRow,
                Vec::new,
                || red.col_ids(&cols),
                || ids.clone(),
                0,
            );
            chosen.extend(ids);
            red.remove_cols(&cols);
            red.remove_rows(&rows);
            continue;
        }

        let rows = red.submissive_rows(true);
        if !rows.is_empty() {
            log.push(
                StepKind::DominantRowDelete,
                || red.row_ids(&rows),
                Vec::new,
                Vec::new,
                0,
            );
            red.remove_rows(&rows);
            continue;
        }

        let cols = red.dominant_cols(true);
        if !cols.is_empty() {
            log.push(
                StepKind::DominantColDelete,
                Vec::new,
                || red.col_ids(&cols),
                Vec::new,
                0,
            );
            red.remove_cols(&cols);
            continue;
        }

        let r = red
            .heuristic_row()
            .expect("a live column without singularities has a covering row");
        let cost = red.weight(r);
        let cols = red.contained_cols(&[r]);
        let id = red.row_ids(&[r])[0];
        log.push(
            StepKind::HeuristicRow,
            Vec::new,
            || red.col_ids(&cols),
            || vec![id],
            cost,
        );
        heuristic_cost += cost;
        total_weight += cost;
        chosen.insert(id);
        red.remove_cols(&cols);
        red.remove_rows(&[r]);
    }

    Selection {
        chosen,
        total_weight,
        heuristic_cost,
        steps: log.steps,
        dropped_singular_rows: matrix.dropped_singular_rows().to_vec(),
    }
}
