//! Deterministic synthetic corpora for property tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bitset::BitSet;
use crate::ingest::{bucket, ShowmapRecord};
use crate::model::{CoverageMatrix, CoverageTrace, EdgeTuple, SeedRecord};

/// Independent Bernoulli(`density`) entries. Weights are uniform in
/// `1..=max_weight`.
pub fn random_matrix<R: Rng>(
    rng: &mut R,
    n_rows: usize,
    n_cols: usize,
    density: f64,
    max_weight: u64,
) -> CoverageMatrix {
    let rows = (0..n_rows)
        .map(|_| BitSet::from_indices(n_cols, (0..n_cols).filter(|_| rng.gen_bool(density))))
        .collect();
    let weights = (0..n_rows).map(|_| rng.gen_range(1..=max_weight)).collect();
    CoverageMatrix::from_rows(n_cols, rows, weights).expect("generated weights are positive")
}

/// Rejection-samples `k` distinct edges; meant for `k` well below `map_size`.
fn sample_edges<R: Rng>(rng: &mut R, map_size: usize, k: usize) -> BTreeSet<u32> {
    let mut set = BTreeSet::new();
    let k = k.min(map_size);
    while set.len() < k {
        set.insert(rng.gen_range(0..map_size) as u32);
    }
    set
}

/// Sparse rows with about `density * n_cols` edges each (uniform in
/// `[k/2, 3k/2]`) and log-uniform byte sizes as weights. Suited to large
/// matrices where [`random_matrix`] would draw every cell.
pub fn sparse_matrix<R: Rng>(
    rng: &mut R,
    n_rows: usize,
    n_cols: usize,
    density: f64,
) -> CoverageMatrix {
    let per_row = ((n_cols as f64) * density).round() as usize;
    let mut rows = Vec::with_capacity(n_rows);
    let mut weights = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let k = rng.gen_range(per_row / 2..=per_row + per_row / 2);
        rows.push(BitSet::from_indices(
            n_cols,
            sample_edges(rng, n_cols, k).into_iter().map(|e| e as usize),
        ));
        weights.push(seed_size(rng));
    }
    CoverageMatrix::from_rows(n_cols, rows, weights).expect("generated weights are positive")
}

/// A corpus with its per-seed showmap records.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub map_size: usize,
    pub seeds: Vec<SeedRecord>,
    pub showmaps: Vec<Vec<ShowmapRecord>>,
}

impl SyntheticCorpus {
    pub fn traces(&self) -> Vec<CoverageTrace> {
        self.showmaps
            .iter()
            .map(|recs| {
                let bits =
                    BitSet::from_indices(self.map_size, recs.iter().map(|r| r.edge_id as usize));
                let tuples = recs
                    .iter()
                    .map(|r| EdgeTuple {
                        edge: r.edge_id,
                        bucket: bucket(r.hit_count),
                    })
                    .collect();
                CoverageTrace {
                    bits,
                    tuples: Some(tuples),
                }
            })
            .collect()
    }
}

fn hit_count<R: Rng>(rng: &mut R) -> u32 {
    // Mostly low counts with a long tail, spanning every bucket.
    let exp = rng.gen_range(0..9);
    rng.gen_range(1..=1u32 << exp)
}

fn seed_size<R: Rng>(rng: &mut R) -> u64 {
    let exp = rng.gen_range(6.0f64..17.0);
    exp.exp2() as u64 + 1
}

/// Independent coverage: each seed hits each edge with probability
/// `density`, with random hit counts and log-uniform sizes.
pub fn uniform_corpus<R: Rng>(
    rng: &mut R,
    n_seeds: usize,
    map_size: usize,
    density: f64,
) -> SyntheticCorpus {
    let per_seed = ((map_size as f64) * density).round() as usize;
    let mut seeds = Vec::with_capacity(n_seeds);
    let mut showmaps = Vec::with_capacity(n_seeds);
    for id in 0..n_seeds {
        let k = if per_seed == 0 {
            0
        } else {
            rng.gen_range(per_seed / 2..=per_seed + per_seed / 2)
        };
        let edges = sample_edges(rng, map_size, k);
        showmaps.push(
            edges
                .into_iter()
                .map(|edge_id| ShowmapRecord {
                    edge_id,
                    hit_count: hit_count(rng),
                })
                .collect(),
        );
        seeds.push(SeedRecord::synthetic(id, seed_size(rng)));
    }
    SyntheticCorpus {
        map_size,
        seeds,
        showmaps,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RedundantParams {
    pub n_seeds: usize,
    pub map_size: usize,
    /// Distinct behaviours; seeds are noisy copies of one behaviour.
    pub behaviours: usize,
    /// Edges every input reaches (parsing prologue and the like).
    pub core_edges: usize,
    /// Edges specific to one behaviour.
    pub behaviour_edges: usize,
    /// Probability that a seed drops each behaviour edge.
    pub drop_rate: f64,
    /// Chances per seed to hit an edge from a shared pool of rare edges.
    pub extra_edges: usize,
    /// Size of the rare-edge pool.
    pub rare_pool: usize,
}

impl RedundantParams {
    pub fn small(n_seeds: usize) -> Self {
        Self {
            n_seeds,
            map_size: 4096,
            behaviours: (n_seeds / 8).max(2),
            core_edges: 40,
            behaviour_edges: 30,
            drop_rate: 0.1,
            extra_edges: 2,
            rare_pool: (n_seeds / 4).max(4),
        }
    }
}

/// Corpora dominated by duplicate behaviour: many seeds exercise nearly the
/// same paths with different hit counts and sizes.
pub fn redundant_corpus<R: Rng>(rng: &mut R, p: RedundantParams) -> SyntheticCorpus {
    let mut universe: Vec<u32> = (0..p.map_size as u32).collect();
    universe.shuffle(rng);
    let core: Vec<u32> = universe[..p.core_edges.min(p.map_size)].to_vec();
    let rest = &universe[core.len()..];
    let rare: Vec<u32> = (0..p.rare_pool)
        .map(|_| rest[rng.gen_range(0..rest.len())])
        .collect();
    let behaviours: Vec<Vec<u32>> = (0..p.behaviours)
        .map(|_| {
            (0..p.behaviour_edges)
                .map(|_| rest[rng.gen_range(0..rest.len())])
                .collect()
        })
        .collect();

    let mut seeds = Vec::with_capacity(p.n_seeds);
    let mut showmaps = Vec::with_capacity(p.n_seeds);
    for id in 0..p.n_seeds {
        let b = &behaviours[rng.gen_range(0..behaviours.len())];
        let mut edges: BTreeSet<u32> = core.iter().copied().collect();
        edges.extend(b.iter().copied().filter(|_| !rng.gen_bool(p.drop_rate)));
        for _ in 0..p.extra_edges {
            if rng.gen_bool(0.5) {
                edges.insert(rare[rng.gen_range(0..rare.len())]);
            }
        }
        showmaps.push(
            edges
                .into_iter()
                .map(|edge_id| ShowmapRecord {
                    edge_id,
                    hit_count: hit_count(rng),
                })
                .collect(),
        );
        seeds.push(SeedRecord::synthetic(id, seed_size(rng)));
    }
    SyntheticCorpus {
        map_size: p.map_size,
        seeds,
        showmaps,
    }
}
