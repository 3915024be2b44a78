//! The five-seed, six-edge reference corpus used throughout the test suites.
//!
//! ```text
//!       e1 e2 e3 e4 e5 e6
//!   s1:  0  0  1  0  1  0
//!   s2:  0  1  0  0  0  0
//!   s3:  1  0  0  0  1  0
//!   s4:  0  0  0  1  1  0
//!   s5:  1  1  0  1  1  0
//! ```
//!
//! `e6` is never hit, `s1` alone covers `e3`, `s5` contains `s2..s4`, and
//! column `e5` contains `e1`, `e3` and `e4`. The weighted variant makes the
//! heavy `s5` unattractive, so its optimum differs from the unweighted one.

use crate::model::{CoverageMatrix, CoverageTrace, SeedRecord};

pub const A0: [[u8; 6]; 5] = [
    [0, 0, 1, 0, 1, 0],
    [0, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 1, 0],
    [1, 1, 0, 1, 1, 0],
];

pub const A0_WEIGHTS: [u64; 5] = [10, 1, 2, 2, 100];

pub fn a0_unweighted() -> CoverageMatrix {
    let rows: Vec<&[u8]> = A0.iter().map(|r| r.as_slice()).collect();
    CoverageMatrix::from_dense(&rows, &[1; 5]).expect("fixture is well formed")
}

pub fn a0_weighted() -> CoverageMatrix {
    let rows: Vec<&[u8]> = A0.iter().map(|r| r.as_slice()).collect();
    CoverageMatrix::from_dense(&rows, &A0_WEIGHTS).expect("fixture is well formed")
}

/// Seed records whose sizes equal the weighted fixture's weights.
pub fn a0_seeds() -> Vec<SeedRecord> {
    A0_WEIGHTS
        .iter()
        .enumerate()
        .map(|(id, &size)| SeedRecord::synthetic(id, size))
        .collect()
}

pub fn a0_traces() -> Vec<CoverageTrace> {
    A0.iter()
        .map(|row| {
            CoverageTrace::from_edges(
                row.len(),
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b == 1)
                    .map(|(j, _)| j),
            )
        })
        .collect()
}
