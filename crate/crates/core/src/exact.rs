//! Exact (weighted) minimum set cover by branch and bound, for small
//! matrices.

use std::collections::BTreeSet;

use crate::bitset::words_for;
use crate::error::{Error, Result};
use crate::model::{CoverageMatrix, SeedId, Selection, WeightScheme};

pub const DEFAULT_ROW_LIMIT: usize = 20;

struct Search<'a> {
    rows: &'a [Vec<u64>],
    weights: &'a [u64],
    /// `suffix[i]` is the union of rows `i..`.
    suffix: Vec<Vec<u64>>,
    best_weight: u64,
    best: Option<Vec<usize>>,
    stack: Vec<usize>,
}

fn gain(row: &[u64], uncovered: &[u64]) -> u32 {
    row.iter()
        .zip(uncovered)
        .map(|(r, u)| (r & u).count_ones())
        .sum()
}

impl Search<'_> {
    fn lower_bound(&self, from: usize, uncovered: &[u64], remaining: u32) -> u64 {
        let mut max_gain = 0;
        let mut min_weight = u64::MAX;
        for i in from..self.rows.len() {
            let g = gain(&self.rows[i], uncovered);
            if g > 0 {
                max_gain = max_gain.max(g);
                min_weight = min_weight.min(self.weights[i]);
            }
        }
        if max_gain == 0 {
            return u64::MAX;
        }
        remaining.div_ceil(max_gain) as u64 * min_weight
    }

    /// Include-first depth-first order visits id sets lexicographically, so
    /// only strict improvements replace the incumbent.
    fn run(&mut self, i: usize, uncovered: Vec<u64>, weight: u64) {
        let remaining: u32 = uncovered.iter().map(|w| w.count_ones()).sum();
        if remaining == 0 {
            if weight < self.best_weight {
                self.best_weight = weight;
                self.best = Some(self.stack.clone());
            }
            return;
        }
        if i == self.rows.len() {
            return;
        }
        if uncovered
            .iter()
            .zip(&self.suffix[i])
            .any(|(u, s)| u & !s != 0)
        {
            return;
        }
        let bound = self.lower_bound(i, &uncovered, remaining);
        if bound == u64::MAX || weight.saturating_add(bound) >= self.best_weight {
            return;
        }
        if gain(&self.rows[i], &uncovered) > 0 {
            let next: Vec<u64> = uncovered
                .iter()
                .zip(&self.rows[i])
                .map(|(u, r)| u & !r)
                .collect();
            self.stack.push(i);
            self.run(i + 1, next, weight + self.weights[i]);
            self.stack.pop();
        }
        self.run(i + 1, uncovered, weight);
    }
}

/// A minimum-weight cover of every coverable live column, using live rows
/// only. Among equal-weight optima the lexicographically smallest id set is
/// returned. Refuses matrices with more than `row_limit` live rows.
pub fn exact_minset(
    matrix: &CoverageMatrix,
    scheme: WeightScheme,
    row_limit: usize,
) -> Result<Selection> {
    let row_ids: Vec<SeedId> = matrix.live_rows().collect();
    if row_ids.len() > row_limit {
        return Err(Error::RowLimit {
            rows: row_ids.len(),
            limit: row_limit,
        });
    }
    let target = matrix.coverable_cols();
    let cols: Vec<usize> = target.iter().collect();
    let words = words_for(cols.len());
    let rows: Vec<Vec<u64>> = row_ids
        .iter()
        .map(|&r| {
            let mut bits = vec![0u64; words];
            for (j, &c) in cols.iter().enumerate() {
                if matrix.row(r).contains(c) {
                    bits[j / 64] |= 1 << (j % 64);
                }
            }
            bits
        })
        .collect();
    let weights: Vec<u64> = row_ids
        .iter()
        .map(|&r| {
            if scheme.is_weighted() {
                matrix.weight(r)
            } else {
                1
            }
        })
        .collect();
    let mut suffix = vec![vec![0u64; words]; rows.len() + 1];
    for i in (0..rows.len()).rev() {
        suffix[i] = suffix[i + 1]
            .iter()
            .zip(&rows[i])
            .map(|(a, b)| a | b)
            .collect();
    }
    let mut full = vec![u64::MAX; words];
    if !cols.len().is_multiple_of(64) {
        full[words - 1] = (1u64 << (cols.len() % 64)) - 1;
    }

    let mut search = Search {
        rows: &rows,
        weights: &weights,
        suffix,
        best_weight: u64::MAX,
        best: None,
        stack: Vec::new(),
    };
    search.run(0, full, 0);
    let picked = search
        .best
        .expect("every coverable column has a covering live row");
    let chosen: BTreeSet<SeedId> = picked.iter().map(|&i| row_ids[i]).collect();
    Ok(Selection {
        chosen,
        total_weight: search.best_weight,
        dropped_singular_rows: matrix.dropped_singular_rows().to_vec(),
        ..Selection::default()
    })
}
