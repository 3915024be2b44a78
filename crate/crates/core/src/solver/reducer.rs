//! Working state for matrix reduction.
//!
//! Rows and columns are held twice, as row bitsets over local columns and
//! column bitsets over local rows. Removing a row or column clears its bits
//! from the opposite view, so both views always describe exactly the live
//! sub-matrix and scans never need masking. Local indices preserve the
//! order of the original ids, so "lowest local index" and "lowest id" agree.
//!
//! Rows that lost a column and columns that lost a row since their last
//! dominance check are tracked as dirty. A row whose live coverage has not
//! changed cannot acquire a new dominator (dominators only shrink), and the
//! same holds for columns, so incremental scans over dirty entries report the
//! same sets as full scans.

use rayon::prelude::*;

use crate::bitset::{words_for, words_subset, BitSet, Ones, WORD_BITS};
use crate::model::{CoverageMatrix, EdgeId, SeedId};

/// Below this many local rows or columns the arrays are never compacted.
const COMPACT_MIN: usize = 128;

/// Scans over fewer candidates than this stay sequential.
const PAR_MIN: usize = 256;

pub(crate) struct Reducer {
    row_ids: Vec<SeedId>,
    col_ids: Vec<EdgeId>,
    row_words: usize,
    col_words: usize,
    row_bits: Vec<u64>,
    col_bits: Vec<u64>,
    live_rows: BitSet,
    live_cols: BitSet,
    n_live_rows: usize,
    n_live_cols: usize,
    row_count: Vec<u32>,
    col_count: Vec<u32>,
    weights: Vec<u64>,
    dirty_rows: BitSet,
    dirty_cols: BitSet,
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
}

#[inline]
fn clear_bit(words: &mut [u64], i: usize) {
    words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
}

/// Builds column-major bitsets from row-major ones. Each chunk of 64 columns
/// reads one word per row, so chunks are filled in parallel.
fn transpose(row_bits: &[u64], n_rows: usize, row_words: usize, n_cols: usize) -> Vec<u64> {
    let col_words = words_for(n_rows);
    let mut col_bits = vec![0u64; n_cols * col_words];
    if col_words == 0 {
        return col_bits;
    }
    col_bits
        .par_chunks_mut(WORD_BITS * col_words)
        .enumerate()
        .for_each(|(w, chunk)| {
            for r in 0..n_rows {
                let mut word = row_bits[r * row_words + w];
                while word != 0 {
                    let k = word.trailing_zeros() as usize;
                    word &= word - 1;
                    set_bit(&mut chunk[k * col_words..(k + 1) * col_words], r);
                }
            }
        });
    col_bits
}

fn popcounts(bits: &[u64], words: usize, n: usize) -> Vec<u32> {
    if words == 0 {
        return vec![0; n];
    }
    bits.chunks(words)
        .map(|c| c.iter().map(|w| w.count_ones()).sum())
        .collect()
}

impl Reducer {
    /// Snapshot of the live sub-matrix. With `weighted == false` every row
    /// weighs 1.
    pub fn from_matrix(matrix: &CoverageMatrix, weighted: bool) -> Self {
        let row_ids: Vec<SeedId> = matrix.live_rows().collect();
        let col_ids: Vec<EdgeId> = matrix.live_cols().collect();
        let mut col_map = vec![u32::MAX; matrix.n_cols()];
        for (local, &c) in col_ids.iter().enumerate() {
            col_map[c] = local as u32;
        }
        let all_cols_live = col_ids.len() == matrix.n_cols();
        let row_words = words_for(col_ids.len());
        let mut row_bits = vec![0u64; row_ids.len() * row_words];
        if row_words > 0 {
            row_bits
                .par_chunks_mut(row_words)
                .zip(row_ids.par_iter())
                .for_each(|(dst, &r)| {
                    let src = matrix.row(r).words();
                    if all_cols_live {
                        dst.copy_from_slice(src);
                    } else {
                        for c in Ones::new(src) {
                            let local = col_map[c];
                            if local != u32::MAX {
                                set_bit(dst, local as usize);
                            }
                        }
                    }
                });
        }
        let weights = row_ids
            .iter()
            .map(|&r| if weighted { matrix.weight(r) } else { 1 })
            .collect();
        Self::assemble(row_ids, col_ids, row_bits, weights)
    }

    fn assemble(
        row_ids: Vec<SeedId>,
        col_ids: Vec<EdgeId>,
        row_bits: Vec<u64>,
        weights: Vec<u64>,
    ) -> Self {
        let (n_rows, n_cols) = (row_ids.len(), col_ids.len());
        let row_words = words_for(n_cols);
        let col_words = words_for(n_rows);
        let col_bits = transpose(&row_bits, n_rows, row_words, n_cols);
        Self {
            row_count: popcounts(&row_bits, row_words, n_rows),
            col_count: popcounts(&col_bits, col_words, n_cols),
            row_ids,
            col_ids,
            row_words,
            col_words,
            row_bits,
            col_bits,
            live_rows: BitSet::full(n_rows),
            live_cols: BitSet::full(n_cols),
            n_live_rows: n_rows,
            n_live_cols: n_cols,
            weights,
            dirty_rows: BitSet::full(n_rows),
            dirty_cols: BitSet::full(n_cols),
        }
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.row_bits[r * self.row_words..(r + 1) * self.row_words]
    }

    #[inline]
    fn col(&self, c: usize) -> &[u64] {
        &self.col_bits[c * self.col_words..(c + 1) * self.col_words]
    }

    pub fn n_live_cols(&self) -> usize {
        self.n_live_cols
    }

    pub fn weight(&self, r: usize) -> u64 {
        self.weights[r]
    }

    pub fn row_ids(&self, local: &[usize]) -> Vec<SeedId> {
        local.iter().map(|&r| self.row_ids[r]).collect()
    }

    pub fn col_ids(&self, local: &[usize]) -> Vec<EdgeId> {
        local.iter().map(|&c| self.col_ids[c]).collect()
    }

    /// Local index of an original row id, if it is live.
    pub fn local_row(&self, id: SeedId) -> Option<usize> {
        self.row_ids
            .binary_search(&id)
            .ok()
            .filter(|&r| self.live_rows.contains(r))
    }

    pub fn singular_cols(&self) -> Vec<usize> {
        self.live_cols
            .iter()
            .filter(|&c| self.col_count[c] == 0)
            .collect()
    }

    pub fn singular_rows(&self) -> Vec<usize> {
        self.live_rows
            .iter()
            .filter(|&r| self.row_count[r] == 0)
            .collect()
    }

    /// Rows that are the only cover of some live column, ascending.
    pub fn exotic_rows(&self) -> Vec<usize> {
        let mut rows: Vec<usize> = self
            .live_cols
            .iter()
            .filter(|&c| self.col_count[c] == 1)
            .filter_map(|c| Ones::new(self.col(c)).next())
            .collect();
        rows.sort_unstable();
        rows.dedup();
        rows
    }

    /// Live columns covered by any of `rows`, ascending.
    pub fn contained_cols(&self, rows: &[usize]) -> Vec<usize> {
        let mut union = vec![0u64; self.row_words];
        for &r in rows {
            for (u, w) in union.iter_mut().zip(self.row(r)) {
                *u |= w;
            }
        }
        Ones::new(&union).collect()
    }

    /// Whether `d` makes `r` deletable: `r`'s coverage is contained in
    /// `d`'s and `d` costs no more. Among identical rows the lighter one,
    /// then the lower index, survives.
    #[inline]
    fn beats(&self, d: usize, r: usize) -> bool {
        let (wd, wr) = (self.weights[d], self.weights[r]);
        if d == r || wd > wr || self.row_count[d] < self.row_count[r] {
            return false;
        }
        if !words_subset(self.row(r), self.row(d)) {
            return false;
        }
        self.row_count[d] > self.row_count[r] || wd < wr || d < r
    }

    /// A dominator of `r` covers all of `r`'s columns, so candidates are the
    /// rows covering both of its two rarest columns.
    fn is_submissive(&self, r: usize) -> bool {
        let (mut first, mut second) = (None::<usize>, None::<usize>);
        for c in Ones::new(self.row(r)) {
            let n = self.col_count[c];
            match (first, second) {
                (Some(f), _) if n < self.col_count[f] => {
                    second = first;
                    first = Some(c);
                }
                (None, _) => first = Some(c),
                (_, Some(s)) if n >= self.col_count[s] => {}
                _ => second = Some(c),
            }
        }
        match (first, second) {
            (Some(a), Some(b)) => {
                let (ca, cb) = (self.col(a), self.col(b));
                ca.iter().zip(cb).enumerate().any(|(i, (x, y))| {
                    let mut w = x & y;
                    while w != 0 {
                        let d = i * WORD_BITS + w.trailing_zeros() as usize;
                        if self.beats(d, r) {
                            return true;
                        }
                        w &= w - 1;
                    }
                    false
                })
            }
            (Some(c), None) => Ones::new(self.col(c)).any(|d| self.beats(d, r)),
            _ => self.live_rows.iter().any(|d| self.beats(d, r)),
        }
    }

    /// Rows with a live dominator at no greater weight, ascending. With
    /// `incremental`, only rows whose coverage changed since their last check
    /// are examined.
    pub fn submissive_rows(&mut self, incremental: bool) -> Vec<usize> {
        let candidates: Vec<usize> = if incremental {
            let mut dirty = self.dirty_rows.clone();
            dirty.intersect_with(&self.live_rows);
            dirty.iter().collect()
        } else {
            self.live_rows.iter().collect()
        };
        let found: Vec<usize> = if candidates.len() >= PAR_MIN {
            candidates
                .par_iter()
                .copied()
                .filter(|&r| self.is_submissive(r))
                .collect()
        } else {
            candidates
                .iter()
                .copied()
                .filter(|&r| self.is_submissive(r))
                .collect()
        };
        if incremental {
            for r in candidates {
                self.dirty_rows.remove(r);
            }
        }
        found
    }

    /// Columns strictly containing `sub`, plus identical columns with a
    /// higher index. An uncoverable `sub` dominates nothing.
    fn dominators_of(&self, sub: usize) -> Vec<usize> {
        let count = self.col_count[sub];
        if count == 0 {
            return Vec::new();
        }
        let holds = |c: usize| {
            c != sub
                && self.col_count[c] >= count
                && (self.col_count[c] > count || c > sub)
                && words_subset(self.col(sub), self.col(c))
        };
        let rarest = Ones::new(self.col(sub))
            .min_by_key(|&r| self.row_count[r])
            .expect("column has a row");
        Ones::new(self.row(rarest)).filter(|&c| holds(c)).collect()
    }

    /// Live columns that contain another live column, ascending.
    pub fn dominant_cols(&mut self, incremental: bool) -> Vec<usize> {
        let candidates: Vec<usize> = if incremental {
            let mut dirty = self.dirty_cols.clone();
            dirty.intersect_with(&self.live_cols);
            dirty.iter().collect()
        } else {
            self.live_cols.iter().collect()
        };
        let per_col: Vec<Vec<usize>> = if candidates.len() >= PAR_MIN {
            candidates
                .par_iter()
                .map(|&c| self.dominators_of(c))
                .collect()
        } else {
            candidates.iter().map(|&c| self.dominators_of(c)).collect()
        };
        if incremental {
            for &c in &candidates {
                self.dirty_cols.remove(c);
            }
        }
        let mut found = BitSet::new(self.col_ids.len());
        for c in per_col.into_iter().flatten() {
            found.insert(c);
        }
        found.iter().collect()
    }

    /// Live row maximising coverage per unit weight; lowest index on ties.
    pub fn heuristic_row(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for r in self.live_rows.iter() {
            best = match best {
                None => Some(r),
                Some(b) => {
                    let lhs = self.row_count[r] as u128 * self.weights[b] as u128;
                    let rhs = self.row_count[b] as u128 * self.weights[r] as u128;
                    if lhs > rhs {
                        Some(r)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best
    }

    pub fn remove_cols(&mut self, cols: &[usize]) {
        let row_words = self.row_words;
        let col_words = self.col_words;
        for &c in cols {
            if !self.live_cols.contains(c) {
                continue;
            }
            self.live_cols.remove(c);
            self.n_live_cols -= 1;
            self.dirty_cols.remove(c);
            let col = &mut self.col_bits[c * col_words..(c + 1) * col_words];
            for r in Ones::new(col) {
                clear_bit(&mut self.row_bits[r * row_words..(r + 1) * row_words], c);
                self.row_count[r] -= 1;
                self.dirty_rows.insert(r);
            }
            col.fill(0);
            self.col_count[c] = 0;
        }
    }

    pub fn remove_rows(&mut self, rows: &[usize]) {
        let row_words = self.row_words;
        let col_words = self.col_words;
        for &r in rows {
            if !self.live_rows.contains(r) {
                continue;
            }
            self.live_rows.remove(r);
            self.n_live_rows -= 1;
            self.dirty_rows.remove(r);
            let row = &mut self.row_bits[r * row_words..(r + 1) * row_words];
            for c in Ones::new(row) {
                clear_bit(&mut self.col_bits[c * col_words..(c + 1) * col_words], r);
                self.col_count[c] -= 1;
                self.dirty_cols.insert(c);
            }
            row.fill(0);
            self.row_count[r] = 0;
        }
    }

    /// Re-indexes to the live sub-matrix once at least half of the rows or
    /// columns are dead. Relative order, and hence tie-breaking, is kept.
    pub fn maybe_compact(&mut self) {
        let (n_rows, n_cols) = (self.row_ids.len(), self.col_ids.len());
        let rows_sparse = n_rows >= COMPACT_MIN && self.n_live_rows * 2 <= n_rows;
        let cols_sparse = n_cols >= COMPACT_MIN && self.n_live_cols * 2 <= n_cols;
        if rows_sparse || cols_sparse {
            self.compact();
        }
    }

    fn compact(&mut self) {
        let keep_rows: Vec<usize> = self.live_rows.iter().collect();
        let keep_cols: Vec<usize> = self.live_cols.iter().collect();
        let mut col_map = vec![u32::MAX; self.col_ids.len()];
        for (new, &old) in keep_cols.iter().enumerate() {
            col_map[old] = new as u32;
        }
        let new_row_words = words_for(keep_cols.len());
        let mut row_bits = vec![0u64; keep_rows.len() * new_row_words];
        if new_row_words > 0 {
            row_bits
                .par_chunks_mut(new_row_words)
                .zip(keep_rows.par_iter())
                .for_each(|(dst, &old)| {
                    for c in Ones::new(self.row(old)) {
                        set_bit(dst, col_map[c] as usize);
                    }
                });
        }
        let dirty_rows: Vec<usize> = keep_rows
            .iter()
            .enumerate()
            .filter(|(_, &old)| self.dirty_rows.contains(old))
            .map(|(new, _)| new)
            .collect();
        let dirty_cols: Vec<usize> = keep_cols
            .iter()
            .enumerate()
            .filter(|(_, &old)| self.dirty_cols.contains(old))
            .map(|(new, _)| new)
            .collect();
        let row_ids = keep_rows.iter().map(|&r| self.row_ids[r]).collect();
        let col_ids = keep_cols.iter().map(|&c| self.col_ids[c]).collect();
        let weights = keep_rows.iter().map(|&r| self.weights[r]).collect();
        let mut next = Self::assemble(row_ids, col_ids, row_bits, weights);
        next.dirty_rows = BitSet::from_indices(keep_rows.len(), dirty_rows);
        next.dirty_cols = BitSet::from_indices(keep_cols.len(), dirty_cols);
        *self = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn transpose_matches_matrix() {
        let m = fixtures::a0_unweighted();
        let red = Reducer::from_matrix(&m, false);
        for c in 0..6 {
            let rows: Vec<usize> = Ones::new(red.col(c)).collect();
            let expect: Vec<usize> = (0..5).filter(|&r| fixtures::A0[r][c] == 1).collect();
            assert_eq!(rows, expect, "column {c}");
        }
        assert_eq!(red.col_count, vec![2, 2, 1, 2, 4, 0]);
        assert_eq!(red.row_count, vec![2, 1, 2, 2, 4]);
    }

    #[test]
    fn removals_keep_views_consistent() {
        let m = fixtures::a0_unweighted();
        let mut red = Reducer::from_matrix(&m, false);
        red.remove_cols(&[4]);
        red.remove_rows(&[0]);
        assert_eq!(red.row_count, vec![0, 1, 1, 1, 3]);
        assert_eq!(red.col_count, vec![2, 2, 0, 2, 0, 0]);
        assert_eq!(red.singular_cols(), vec![2, 5]);
    }

    #[test]
    fn compaction_preserves_ids() {
        let n = 300;
        let rows: Vec<BitSet> = (0..n)
            .map(|i| BitSet::from_indices(200, [i % 200, (i * 7) % 200]))
            .collect();
        let m = CoverageMatrix::from_rows(200, rows, vec![1; n]).unwrap();
        let mut red = Reducer::from_matrix(&m, false);
        let drop: Vec<usize> = (0..n).filter(|i| i % 3 != 0).collect();
        red.remove_rows(&drop);
        red.maybe_compact();
        assert_eq!(red.row_ids.len(), 100);
        assert_eq!(red.row_ids(&[0, 1, 99]), vec![0, 3, 297]);
        let r = red.local_row(3).unwrap();
        assert_eq!(red.row_count[r], 2);
        assert_eq!(red.col_ids(&red.contained_cols(&[r])), vec![3, 21]);
    }
}
