//! Comparison distillers: greedy-reduced Minset, cmin-style tuple cover,
//! random sampling and the identity selection.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{CoverageMatrix, EdgeTuple, SeedId, SeedRecord, Selection};

fn gain(row: &BitSet, uncovered: &BitSet) -> usize {
    row.words()
        .iter()
        .zip(uncovered.words())
        .map(|(r, u)| (r & u).count_ones() as usize)
        .sum()
}

/// Unweighted greedy set cover followed by a redundancy pass.
///
/// The greedy phase repeatedly takes the live row covering the most
/// uncovered columns (lowest id on ties). The pass then walks the picks in
/// reverse order and drops any whose columns are all still covered by the
/// others. `total_weight` is the number of seeds.
pub fn minset_unweighted(matrix: &CoverageMatrix) -> Selection {
    let mut uncovered = matrix.coverable_cols();
    let mut cover_count = vec![0u32; matrix.n_cols()];
    let mut order: Vec<SeedId> = Vec::new();

    // Gains only shrink, so a popped entry whose refreshed gain still
    // outranks the next entry is the true maximum.
    let mut heap: BinaryHeap<(usize, Reverse<SeedId>)> = matrix
        .live_rows()
        .map(|r| (gain(matrix.row(r), &uncovered), Reverse(r)))
        .filter(|&(g, _)| g > 0)
        .collect();
    while let Some((_, Reverse(r))) = heap.pop() {
        if uncovered.none() {
            break;
        }
        let g = gain(matrix.row(r), &uncovered);
        if g == 0 {
            continue;
        }
        if let Some(&top) = heap.peek() {
            if (g, Reverse(r)) < top {
                heap.push((g, Reverse(r)));
                continue;
            }
        }
        order.push(r);
        uncovered.difference_with(matrix.row(r));
    }

    let live_cols = matrix.live_col_set();
    for &r in &order {
        for c in matrix.row(r).iter().filter(|&c| live_cols.contains(c)) {
            cover_count[c] += 1;
        }
    }
    let mut chosen: BTreeSet<SeedId> = order.iter().copied().collect();
    for &r in order.iter().rev() {
        let cols: Vec<usize> = matrix
            .row(r)
            .iter()
            .filter(|&c| live_cols.contains(c))
            .collect();
        if cols.iter().all(|&c| cover_count[c] > 1) {
            for c in cols {
                cover_count[c] -= 1;
            }
            chosen.remove(&r);
        }
    }
    Selection::from_chosen(chosen, |_| 1)
}

/// cmin-style distillation over `(edge, bucket)` tuples.
///
/// Each tuple nominates its smallest covering seed (lowest id on ties).
/// Tuples are then swept in ascending order, and an uncovered tuple adds its
/// nominee, whose tuples all become covered. `total_weight` is the byte
/// total.
pub fn cmin_distill(
    tuple_traces: &[Option<&BTreeSet<EdgeTuple>>],
    seeds: &[SeedRecord],
) -> Result<Selection> {
    if tuple_traces.len() != seeds.len() {
        return Err(Error::LengthMismatch {
            traces: tuple_traces.len(),
            seeds: seeds.len(),
        });
    }
    let mut sets = Vec::with_capacity(seeds.len());
    for (id, t) in tuple_traces.iter().enumerate() {
        sets.push(t.ok_or(Error::MissingTuples { id })?);
    }

    let mut nominee: BTreeMap<EdgeTuple, SeedId> = BTreeMap::new();
    for (id, set) in sets.iter().enumerate() {
        for &tuple in set.iter() {
            nominee
                .entry(tuple)
                .and_modify(|cur| {
                    if seeds[id].size_bytes < seeds[*cur].size_bytes {
                        *cur = id;
                    }
                })
                .or_insert(id);
        }
    }

    let mut covered: BTreeSet<EdgeTuple> = BTreeSet::new();
    let mut chosen = BTreeSet::new();
    for (tuple, &id) in &nominee {
        if covered.contains(tuple) {
            continue;
        }
        chosen.insert(id);
        covered.extend(sets[id].iter().copied());
    }
    Ok(Selection::from_chosen(chosen, |id| seeds[id].size_bytes))
}

/// Uniform sample of `k` seeds without replacement, reproducible from
/// `rng_seed`.
pub fn random_sample(seeds: &[SeedRecord], k: usize, rng_seed: u64) -> Result<Selection> {
    let n = seeds.len();
    if k == 0 || k > n {
        return Err(Error::SampleSize { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let chosen = index::sample(&mut rng, n, k).into_iter().collect();
    Ok(Selection::from_chosen(chosen, |_| 1))
}

/// Every seed.
pub fn full_selection(seeds: &[SeedRecord]) -> Selection {
    Selection::from_chosen((0..seeds.len()).collect(), |_| 1)
}
