//! Coverage-preserving corpus distillation for coverage-guided fuzzing.
//!
//! Per-seed edge coverage (from `afl-showmap`) becomes a weighted boolean
//! matrix, and a distiller picks a small, or light, subset of seeds with the
//! same total coverage. [`solver::moonlight_distill`] reduces the matrix with
//! optimality-preserving row and column eliminations and only falls back to a
//! greedy pick when none applies; the [`baseline`] and [`exact`] modules hold
//! comparison distillers and the ground truth used in tests.

pub mod baseline;
mod bitset;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod ingest;
pub mod model;
pub mod report;
pub mod solver;
pub mod synth;

pub use bitset::{BitSet, Ones};
pub use error::{Error, Result};
pub use model::{
    build_matrix, canonicalize, union_coverage, CoverageMatrix, CoverageTrace, EdgeId, EdgeTuple,
    ReductionStep, SeedId, SeedRecord, Selection, StepKind, WeightScheme, DEFAULT_MAP_SIZE,
};
pub use solver::{moonlight_distill, SolverConfig, TieBreak};
