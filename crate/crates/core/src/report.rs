//! Corpus statistics, cover verification and multi-algorithm comparison
//! tables.

use std::collections::BTreeSet;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{union_coverage, CoverageMatrix, EdgeId, SeedRecord, Selection, StepKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub file_count: usize,
    pub total_size_bytes: u64,
}

pub fn corpus_stats(seeds: &[SeedRecord], selection: Option<&Selection>) -> Result<CorpusStats> {
    match selection {
        None => Ok(CorpusStats {
            file_count: seeds.len(),
            total_size_bytes: seeds.iter().map(|s| s.size_bytes).sum(),
        }),
        Some(sel) => {
            let mut total = 0;
            for &id in &sel.chosen {
                total += seeds.get(id).ok_or(Error::UnknownRow(id))?.size_bytes;
            }
            Ok(CorpusStats {
                file_count: sel.chosen.len(),
                total_size_bytes: total,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Missing(BTreeSet<EdgeId>),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

/// Checks that the chosen seeds cover every coverable live column of
/// `matrix`. Unknown ids cover nothing.
pub fn verify_cover(matrix: &CoverageMatrix, selection: &Selection) -> Verdict {
    let known: BTreeSet<_> = selection
        .chosen
        .iter()
        .copied()
        .filter(|&id| id < matrix.n_rows())
        .collect();
    let mut missing = matrix.coverable_cols();
    let covered = union_coverage(matrix, &known).expect("ids filtered to range");
    missing.difference_with(&covered);
    if missing.none() {
        Verdict::Ok
    } else {
        Verdict::Missing(missing.iter().collect())
    }
}

pub struct AlgoRun {
    pub algo: String,
    pub selection: Selection,
    pub wall: Duration,
    /// Allows a selection that does not preserve coverage into the report
    /// (random sampling).
    pub exempt: bool,
}

pub const REPORT_HEADER: [&str; 11] = [
    "algo",
    "files",
    "bytes",
    "cost",
    "steps_singularity",
    "steps_exotic",
    "steps_row_dom",
    "steps_col_dom",
    "steps_heuristic",
    "wall_ms",
    "coverage_ok",
];

/// `"true"` for a verified cover; `"exempt"` for an exempt run that misses
/// coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageStatus {
    True,
    Exempt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub algo: String,
    pub files: usize,
    pub bytes: u64,
    pub cost: u64,
    pub steps_singularity: usize,
    pub steps_exotic: usize,
    pub steps_row_dom: usize,
    pub steps_col_dom: usize,
    pub steps_heuristic: usize,
    pub wall_ms: u64,
    pub coverage_ok: CoverageStatus,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

/// One row per run. A non-exempt run whose selection fails
/// [`verify_cover`] is refused.
pub fn compare_report(
    matrix: &CoverageMatrix,
    seeds: &[SeedRecord],
    runs: &[AlgoRun],
) -> Result<Report> {
    let mut rows = Vec::with_capacity(runs.len());
    for run in runs {
        let coverage_ok = match verify_cover(matrix, &run.selection) {
            Verdict::Ok => CoverageStatus::True,
            Verdict::Missing(_) if run.exempt => CoverageStatus::Exempt,
            Verdict::Missing(_) => {
                return Err(Error::Unverified {
                    algo: run.algo.clone(),
                })
            }
        };
        let stats = corpus_stats(seeds, Some(&run.selection))?;
        let sel = &run.selection;
        rows.push(ReportRow {
            algo: run.algo.clone(),
            files: stats.file_count,
            bytes: stats.total_size_bytes,
            cost: sel.heuristic_cost,
            steps_singularity: sel.step_count(StepKind::ColSingularity)
                + sel.step_count(StepKind::RowSingularity),
            steps_exotic: sel.step_count(StepKind::ExoticRow),
            steps_row_dom: sel.step_count(StepKind::DominantRowDelete),
            steps_col_dom: sel.step_count(StepKind::DominantColDelete),
            steps_heuristic: sel.step_count(StepKind::HeuristicRow),
            wall_ms: run.wall.as_millis() as u64,
            coverage_ok,
        });
    }
    Ok(Report { rows })
}

impl Report {
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        wtr.write_record(REPORT_HEADER)?;
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        let bytes = wtr
            .into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
