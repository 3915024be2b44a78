use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use moonlight_core::baseline::{cmin_distill, full_selection, minset_unweighted, random_sample};
use moonlight_core::exact::{exact_minset, DEFAULT_ROW_LIMIT};
use moonlight_core::ingest::{
    convert_showmaps, load_traces, missing_traces, prep_corpus, Manifest, TraceSource,
};
use moonlight_core::report::{
    compare_report, corpus_stats, verify_cover, AlgoRun, Report, Verdict,
};
use moonlight_core::{
    build_matrix, moonlight_distill, CoverageMatrix, CoverageTrace, Error, SeedRecord, Selection,
    SolverConfig, WeightScheme,
};

use crate::exit::{Failure, INGEST, PRECONDITION, USAGE, VERIFY};
use crate::{
    Algo, CompareArgs, DistillArgs, Format, PrepArgs, RunOpts, StatsArgs, TraceArgs, VerifyArgs,
};

type CmdResult = Result<(), Failure>;

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn load_seeds(manifest: &Path) -> Result<Vec<SeedRecord>, Failure> {
    Ok(Manifest::load(manifest)?.seeds()?)
}

struct Corpus {
    seeds: Vec<SeedRecord>,
    traces: Vec<CoverageTrace>,
    matrix: CoverageMatrix,
}

fn load_corpus(
    manifest: &Path,
    traces: &Path,
    map_size: usize,
    scheme: WeightScheme,
    need_text: bool,
) -> Result<Corpus, Failure> {
    let seeds = load_seeds(manifest)?;
    let source = if need_text {
        let missing = missing_traces(traces, seeds.len(), TraceSource::Text);
        if !missing.is_empty() {
            return Err(Failure::new(
                PRECONDITION,
                format!("cmin needs showmap text traces; none for seed ids {missing:?}"),
            ));
        }
        TraceSource::Text
    } else {
        TraceSource::PreferBinary
    };
    let traces = load_traces(traces, seeds.len(), map_size, source)?;
    let matrix = build_matrix(&traces, &seeds, scheme)?;
    log::info!(
        "{} seeds, {} coverable edges",
        matrix.live_row_count(),
        matrix.coverable_cols().count_ones()
    );
    Ok(Corpus {
        seeds,
        traces,
        matrix,
    })
}

fn read_selection(path: &Path, n_seeds: usize) -> Result<Selection, Failure> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut chosen = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let id: usize = line.parse().map_err(|_| {
            Failure::new(
                INGEST,
                format!(
                    "{}: line {}: not a seed id: {line:?}",
                    path.display(),
                    i + 1
                ),
            )
        })?;
        if id >= n_seeds {
            return Err(Error::UnknownRow(id).into());
        }
        chosen.insert(id);
    }
    Ok(Selection::from_chosen(chosen, |_| 1))
}

fn render_selection(sel: &Selection) -> String {
    sel.chosen.iter().map(|id| format!("{id}\n")).collect()
}

fn run_algo(algo: Algo, run: &RunOpts, corpus: &Corpus) -> Result<Selection, Failure> {
    let scheme = WeightScheme::from(run.weight);
    let m = &corpus.matrix;
    let sel = match algo {
        Algo::Moonlight => moonlight_distill(m, &SolverConfig::new(scheme)),
        Algo::Minset => minset_unweighted(m),
        Algo::Cmin => {
            let tuples: Vec<_> = corpus.traces.iter().map(|t| t.tuples.as_ref()).collect();
            cmin_distill(&tuples, &corpus.seeds)?
        }
        Algo::Random => {
            let k = run
                .k
                .ok_or_else(|| Failure::new(USAGE, "--k is required for the random distiller"))?;
            random_sample(&corpus.seeds, k as usize, run.rng_seed)?
        }
        Algo::Exact => exact_minset(m, scheme, DEFAULT_ROW_LIMIT)?,
        Algo::Full => full_selection(&corpus.seeds),
    };
    Ok(sel)
}

fn timed_runs(algos: &[Algo], run: &RunOpts, corpus: &Corpus) -> Result<Vec<AlgoRun>, Failure> {
    algos
        .iter()
        .map(|&algo| {
            let start = Instant::now();
            let selection = run_algo(algo, run, corpus)?;
            let wall = start.elapsed();
            log::info!("{}: {} seeds in {:?}", algo.name(), selection.len(), wall);
            Ok(AlgoRun {
                algo: algo.name().to_string(),
                selection,
                wall,
                exempt: algo == Algo::Random,
            })
        })
        .collect()
}

/// Target file names for copied seeds. Basenames shared by several
/// selected seeds get an id prefix.
fn copy_names(seeds: &[SeedRecord], sel: &Selection) -> Vec<(usize, String)> {
    let base = |id: usize| {
        Path::new(&seeds[id].path)
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("seed-{id}"))
    };
    let mut uses: BTreeMap<String, usize> = BTreeMap::new();
    for &id in &sel.chosen {
        *uses.entry(base(id)).or_default() += 1;
    }
    sel.chosen
        .iter()
        .map(|&id| {
            let name = base(id);
            if uses[&name] > 1 {
                (id, format!("{id}_{name}"))
            } else {
                (id, name)
            }
        })
        .collect()
}

fn copy_selection(seeds: &[SeedRecord], sel: &Selection, dir: &Path) -> CmdResult {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Failure::from(Error::Io { path, source })
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for (id, name) in copy_names(seeds, sel) {
        let from = Path::new(&seeds[id].path);
        fs::copy(from, dir.join(name)).map_err(io(from))?;
    }
    Ok(())
}

pub fn prep(args: PrepArgs) -> CmdResult {
    let outcome = prep_corpus(&args.input, args.max_size).map_err(|e| match e {
        Error::Io { .. } => Failure::new(USAGE, e),
        other => other.into(),
    })?;
    log::info!(
        "kept {}, dropped {} duplicates, {} oversize, {} unreadable",
        outcome.manifest.len(),
        outcome.duplicates,
        outcome.oversize,
        outcome.unreadable
    );
    outcome.manifest.save(&args.out)?;
    Ok(())
}

pub fn trace(args: TraceArgs) -> CmdResult {
    let seeds = load_seeds(&args.manifest)?;
    convert_showmaps(&args.showmap_dir, &args.out, seeds.len(), args.map_size)?;
    log::info!("wrote {} traces", seeds.len());
    Ok(())
}

pub fn distill(args: DistillArgs) -> CmdResult {
    let scheme = WeightScheme::from(args.run.weight);
    let corpus = load_corpus(
        &args.run.manifest,
        &args.run.traces,
        args.run.map_size,
        scheme,
        args.algo == Algo::Cmin,
    )?;
    let runs = timed_runs(&[args.algo], &args.run, &corpus)?;
    let sel = &runs[0].selection;
    write_file(&args.out, render_selection(sel).as_bytes())?;
    if let Some(dir) = &args.copy_to {
        copy_selection(&corpus.seeds, sel, dir)?;
    }
    if let Some(path) = &args.report {
        let report = compare_report(&corpus.matrix, &corpus.seeds, &runs)?;
        write_file(path, report.to_json().as_bytes())?;
    }
    Ok(())
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let corpus = load_corpus(
        &args.manifest,
        &args.traces,
        args.map_size,
        WeightScheme::Unweighted,
        false,
    )?;
    let sel = read_selection(&args.selection, corpus.seeds.len())?;
    match verify_cover(&corpus.matrix, &sel) {
        Verdict::Ok => Ok(()),
        Verdict::Missing(cols) => {
            let list: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
            Err(Failure::new(
                VERIFY,
                format!("coverage lost; uncovered edges: {}", list.join(",")),
            ))
        }
    }
}

pub fn stats(args: StatsArgs) -> CmdResult {
    let seeds = load_seeds(&args.manifest)?;
    let sel = match &args.selection {
        Some(path) => Some(read_selection(path, seeds.len())?),
        None => None,
    };
    let stats = corpus_stats(&seeds, sel.as_ref())?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "files {}", stats.file_count)
        .and_then(|_| writeln!(out, "bytes {}", stats.total_size_bytes))
        .map_err(|e| Failure::new(INGEST, e))
}

pub fn compare(args: CompareArgs) -> CmdResult {
    let scheme = WeightScheme::from(args.run.weight);
    let corpus = load_corpus(
        &args.run.manifest,
        &args.run.traces,
        args.run.map_size,
        scheme,
        args.algos.contains(&Algo::Cmin),
    )?;
    let runs = timed_runs(&args.algos, &args.run, &corpus)?;
    let report: Report = compare_report(&corpus.matrix, &corpus.seeds, &runs)?;
    let text = match args.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json(),
    };
    match &args.out {
        Some(path) => write_file(path, text.as_bytes()),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(INGEST, e)),
    }
}
