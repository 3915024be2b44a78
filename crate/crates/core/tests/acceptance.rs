//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use moonlight_core::baseline::{cmin_distill, minset_unweighted};
use moonlight_core::exact::{exact_minset, DEFAULT_ROW_LIMIT};
use moonlight_core::ingest::{decode_trace, encode_trace, parse_showmap, read_trace, write_trace};
use moonlight_core::report::verify_cover;
use moonlight_core::solver::{
    contained_columns, find_column_singularities, find_dominant_columns, find_exotic_rows,
    find_row_singularities, find_submissive_rows, heuristic_row,
};
use moonlight_core::synth::{
    random_matrix, redundant_corpus, sparse_matrix, uniform_corpus, RedundantParams,
    SyntheticCorpus,
};
use moonlight_core::{
    build_matrix, canonicalize, fixtures, moonlight_distill, CoverageMatrix, CoverageTrace, Error,
    SeedRecord, Selection, SolverConfig, StepKind, WeightScheme,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn distill(m: &CoverageMatrix, scheme: WeightScheme) -> Selection {
    moonlight_distill(m, &SolverConfig::new(scheme))
}

fn optimum(m: &CoverageMatrix, scheme: WeightScheme) -> u64 {
    exact_minset(m, scheme, DEFAULT_ROW_LIMIT)
        .expect("instance within oracle limit")
        .total_weight
}

fn fixture_unweighted() -> Outcome {
    let m = fixtures::a0_unweighted();
    let sel = distill(&m, WeightScheme::Unweighted);
    check(sel.chosen == BTreeSet::from([0, 4]), || {
        format!("chosen {:?}", sel.chosen)
    })?;
    check(sel.heuristic_cost == 0, || {
        format!("cost {}", sel.heuristic_cost)
    })?;
    let trace: Vec<(StepKind, Vec<usize>)> = sel
        .steps
        .iter()
        .map(|s| {
            let ids = match s.kind {
                StepKind::ColSingularity => s.cols_removed.clone(),
                StepKind::ExoticRow => s.rows_selected.clone(),
                _ => s.rows_removed.clone(),
            };
            (s.kind, ids)
        })
        .collect();
    let expect = vec![
        (StepKind::ColSingularity, vec![5]),
        (StepKind::ExoticRow, vec![0]),
        (StepKind::DominantRowDelete, vec![1, 2, 3]),
        (StepKind::ExoticRow, vec![4]),
    ];
    check(trace == expect, || format!("trace {trace:?}"))?;
    let opt = optimum(&m, WeightScheme::Unweighted);
    check(opt == 2, || format!("oracle optimum {opt}"))?;
    Ok("selects {s1,s5}, cost 0, expected trace; oracle optimum 2".into())
}

fn fixture_weighted() -> Outcome {
    let m = fixtures::a0_weighted();
    let sel = distill(&m, WeightScheme::Size);
    check(sel.chosen == BTreeSet::from([0, 1, 2, 3]), || {
        format!("chosen {:?}", sel.chosen)
    })?;
    check(sel.total_weight == 15, || {
        format!("weight {}", sel.total_weight)
    })?;
    check(sel.heuristic_cost == 3, || {
        format!("cost {}", sel.heuristic_cost)
    })?;
    let opt = optimum(&m, WeightScheme::Size);
    check(opt == 15, || format!("oracle optimum {opt}"))?;
    Ok("selects {s1,s2,s3,s4}, weight 15, cost 3; oracle optimum 15".into())
}

fn small_instances() -> Vec<CoverageMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce97);
    let densities = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
    (0..1200)
        .map(|_| {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=16);
            let d = *densities.choose(&mut rng).unwrap();
            random_matrix(&mut rng, n, m, d, 10)
        })
        .collect()
}

fn removed(m: &CoverageMatrix, rows: &[usize], cols: &[usize]) -> CoverageMatrix {
    let mut next = m.clone();
    next.remove_rows(rows.iter().copied());
    next.remove_cols(cols.iter().copied());
    next
}

/// Checks every applicable lemma at `m`, then returns the state after the
/// highest-priority reduction (or a heuristic pick), mirroring the solver.
fn lemma_step(m: &CoverageMatrix, checked: &mut usize) -> Result<Option<CoverageMatrix>, String> {
    if m.live_col_count() == 0 {
        return Ok(None);
    }
    let opt_u = optimum(m, WeightScheme::Unweighted);
    let opt_w = optimum(m, WeightScheme::Size);
    let mut violation = |name: &str, ok: bool| {
        *checked += 1;
        check(ok, || format!("{name} changes the optimum"))
    };

    let sing_cols = find_column_singularities(m);
    let sing_rows = find_row_singularities(m);
    if !sing_cols.is_empty() || !sing_rows.is_empty() {
        let next = removed(m, &sing_rows, &sing_cols);
        violation(
            "singularity removal",
            optimum(&next, WeightScheme::Unweighted) == opt_u
                && optimum(&next, WeightScheme::Size) == opt_w,
        )?;
    }

    let exotic = find_exotic_rows(m);
    if !exotic.is_empty() {
        let set: BTreeSet<usize> = exotic.iter().copied().collect();
        let next = removed(m, &exotic, &contained_columns(m, &set));
        let forced_w: u64 = exotic.iter().map(|&r| m.weight(r)).sum();
        violation(
            "exotic step",
            optimum(&next, WeightScheme::Unweighted) + exotic.len() as u64 == opt_u
                && optimum(&next, WeightScheme::Size) + forced_w == opt_w,
        )?;
    }

    let sub_u = find_submissive_rows(m, WeightScheme::Unweighted);
    if !sub_u.is_empty() {
        let next = removed(m, &sub_u, &[]);
        violation(
            "unweighted submissive deletion",
            optimum(&next, WeightScheme::Unweighted) == opt_u,
        )?;
    }
    let sub_w = find_submissive_rows(m, WeightScheme::Size);
    if !sub_w.is_empty() {
        let next = removed(m, &sub_w, &[]);
        violation(
            "weighted submissive deletion",
            optimum(&next, WeightScheme::Size) == opt_w,
        )?;
    }

    let dom = find_dominant_columns(m);
    if !dom.is_empty() {
        let next = removed(m, &[], &dom);
        violation(
            "dominant-column deletion",
            optimum(&next, WeightScheme::Unweighted) == opt_u
                && optimum(&next, WeightScheme::Size) == opt_w,
        )?;
    }

    for r in m.live_rows().collect::<Vec<_>>() {
        let next = removed(m, &[r], &contained_columns(m, &BTreeSet::from([r])));
        let gap = 1 + optimum(&next, WeightScheme::Unweighted) as i64 - opt_u as i64;
        violation("single-row contained-column step", (0..=1).contains(&gap))?;
    }

    let next = if !sing_cols.is_empty() {
        removed(m, &[], &sing_cols)
    } else if !sing_rows.is_empty() {
        removed(m, &sing_rows, &[])
    } else if !exotic.is_empty() {
        let set: BTreeSet<usize> = exotic.iter().copied().collect();
        removed(m, &exotic, &contained_columns(m, &set))
    } else if !sub_w.is_empty() {
        removed(m, &sub_w, &[])
    } else if !dom.is_empty() {
        removed(m, &[], &dom)
    } else {
        let r = heuristic_row(m, WeightScheme::Size).map_err(|e| e.to_string())?;
        removed(m, &[r], &contained_columns(m, &BTreeSet::from([r])))
    };
    Ok(Some(next))
}

fn lemma_suite(instances: &[CoverageMatrix]) -> Outcome {
    let mut checked = 0;
    for (i, m) in instances.iter().enumerate() {
        let mut state = Some(m.clone());
        while let Some(s) = state {
            state = lemma_step(&s, &mut checked).map_err(|e| format!("instance {i}: {e}"))?;
        }
    }
    Ok(format!(
        "{} matrices, {checked} lemma applications, 0 violations",
        instances.len()
    ))
}

fn zero_cost_optimality(instances: &[CoverageMatrix]) -> Outcome {
    let mut zero_cost = 0;
    for (i, m) in instances.iter().enumerate() {
        for scheme in [WeightScheme::Unweighted, WeightScheme::Size] {
            let sel = distill(m, scheme);
            if sel.heuristic_cost != 0 {
                continue;
            }
            zero_cost += 1;
            let opt = optimum(m, scheme);
            check(sel.total_weight == opt, || {
                format!(
                    "instance {i} ({scheme:?}): weight {} vs optimum {opt}",
                    sel.total_weight
                )
            })?;
        }
    }
    Ok(format!(
        "{zero_cost} zero-cost runs over {} matrices, all optimal",
        instances.len()
    ))
}

fn random_corpus(rng: &mut ChaCha8Rng, max_seeds: usize) -> SyntheticCorpus {
    let n = rng.gen_range(1..=max_seeds);
    if rng.gen_bool(0.5) {
        let density = rng.gen_range(0.002..0.05);
        uniform_corpus(rng, n, 4096, density)
    } else {
        redundant_corpus(rng, RedundantParams::small(n))
    }
}

fn coverage_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let corpora = 200;
    for i in 0..corpora {
        let corpus = random_corpus(&mut rng, 200);
        let traces = corpus.traces();
        let m =
            build_matrix(&traces, &corpus.seeds, WeightScheme::Size).map_err(|e| e.to_string())?;
        let tuples: Vec<_> = traces.iter().map(|t| t.tuples.as_ref()).collect();
        let runs = [
            ("moonlight/none", distill(&m, WeightScheme::Unweighted)),
            ("moonlight/size", distill(&m, WeightScheme::Size)),
            ("minset", minset_unweighted(&m)),
            (
                "cmin",
                cmin_distill(&tuples, &corpus.seeds).map_err(|e| e.to_string())?,
            ),
        ];
        for (algo, sel) in &runs {
            check(verify_cover(&m, sel).is_ok(), || {
                format!("corpus {i}: {algo} loses coverage")
            })?;
        }
    }
    Ok(format!(
        "{corpora} corpora x 4 distillers, every cover verified"
    ))
}

fn paths(seeds: &[SeedRecord], sel: &Selection) -> Vec<String> {
    sel.chosen
        .iter()
        .map(|&id| seeds[id].path.clone())
        .collect()
}

fn with_sizes(seeds: &[SeedRecord], f: impl Fn(u64) -> u64) -> Vec<SeedRecord> {
    seeds
        .iter()
        .map(|s| SeedRecord {
            size_bytes: f(s.size_bytes),
            ..s.clone()
        })
        .collect()
}

fn invariances() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let corpora = 100;
    for i in 0..corpora {
        let corpus = random_corpus(&mut rng, 150);
        let traces = corpus.traces();
        let build = |seeds: &[SeedRecord], traces: &[CoverageTrace], scheme| {
            build_matrix(traces, seeds, scheme).map_err(|e: Error| e.to_string())
        };
        let (seeds, traces) = canonicalize(corpus.seeds.iter().cloned().zip(traces).collect());
        let base = distill(
            &build(&seeds, &traces, WeightScheme::Size)?,
            WeightScheme::Size,
        );
        let base_u = distill(
            &build(&seeds, &traces, WeightScheme::Unweighted)?,
            WeightScheme::Unweighted,
        );

        let mut pairs: Vec<_> = seeds.iter().cloned().zip(traces.iter().cloned()).collect();
        pairs.shuffle(&mut rng);
        let (p_seeds, p_traces) = canonicalize(pairs);
        let permuted = distill(
            &build(&p_seeds, &p_traces, WeightScheme::Size)?,
            WeightScheme::Size,
        );
        check(paths(&p_seeds, &permuted) == paths(&seeds, &base), || {
            format!("corpus {i}: permutation changes the selection")
        })?;
        check(permuted.steps == base.steps, || {
            format!("corpus {i}: permutation changes the trace")
        })?;

        let c = rng.gen_range(1..=1_000_000);
        let uniform = distill(
            &build(&with_sizes(&seeds, |_| c), &traces, WeightScheme::Size)?,
            WeightScheme::Size,
        );
        check(uniform.chosen == base_u.chosen, || {
            format!("corpus {i}: uniform weights differ from unweighted")
        })?;

        let k = rng.gen_range(2..=1000);
        let scaled = distill(
            &build(&with_sizes(&seeds, |s| s * k), &traces, WeightScheme::Size)?,
            WeightScheme::Size,
        );
        check(
            scaled.chosen == base.chosen && scaled.step_kinds() == base.step_kinds(),
            || format!("corpus {i}: scaling by {k} changes the selection"),
        )?;
    }
    Ok(format!(
        "{corpora} corpora: permutation, uniform-weight and scaling invariances hold"
    ))
}

fn round_trip(trace: &CoverageTrace) -> Result<(), String> {
    let bytes = encode_trace(trace);
    let back = decode_trace(&bytes).map_err(|e| e.to_string())?;
    check(back.bits == trace.bits, || {
        format!("decode mismatch at map size {}", trace.map_size())
    })?;
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).map_err(|e| e.to_string())?;
    check(buf == bytes, || "writer differs from encoder".into())?;
    let back = read_trace(buf.as_slice()).map_err(|e| e.to_string())?;
    check(back.bits == trace.bits, || "read mismatch".into())
}

fn expect_line(text: &str, line: usize) -> Result<(), String> {
    match parse_showmap(text.as_bytes()) {
        Err(Error::MalformedLine { line: l, .. })
        | Err(Error::ZeroHitCount { line: l, .. })
        | Err(Error::DuplicateEdge { line: l, .. })
            if l == line =>
        {
            Ok(())
        }
        other => Err(format!(
            "{text:?}: expected an error on line {line}, got {other:?}"
        )),
    }
}

fn formats() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut traces = vec![
        CoverageTrace::empty(65536),
        CoverageTrace::from_edges(65536, 0..65536),
        CoverageTrace::empty(13),
        CoverageTrace::from_edges(13, 0..13),
    ];
    while traces.len() < 100 {
        let map_size = rng.gen_range(1..=70_000);
        let density = rng.gen_range(0.0..1.0);
        let edges: Vec<usize> = (0..map_size).filter(|_| rng.gen_bool(density)).collect();
        traces.push(CoverageTrace::from_edges(map_size, edges));
    }
    for t in &traces {
        round_trip(t)?;
    }

    let padded = parse_showmap(b"000012:3\n000000:1\n").map_err(|e| e.to_string())?;
    let unpadded = parse_showmap(b"12:3\n0:1\n").map_err(|e| e.to_string())?;
    check(
        padded == unpadded && padded.len() == 2 && padded[0].edge_id == 12,
        || format!("padded {padded:?} vs unpadded {unpadded:?}"),
    )?;
    expect_line("1:1\nfoo\n", 2)?;
    expect_line("1:1\n2:2\n\n3\n", 4)?;
    expect_line("1234567:1\n", 1)?;
    expect_line("1:1\n2:-4\n", 2)?;
    expect_line("7:0\n", 1)?;
    expect_line("1:1\n1:2\n", 2)?;
    expect_line("1:1\r\n", 1)?;
    Ok(format!(
        "{} binary round-trips; showmap padding and line-numbered errors",
        traces.len()
    ))
}

fn size_ordering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let corpora = 200;
    let (mut ml_files, mut ml_bytes, mut cm_files, mut cm_bytes) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..corpora {
        let n = rng.gen_range(50..=200);
        let corpus = redundant_corpus(&mut rng, RedundantParams::small(n));
        let traces = corpus.traces();
        let m =
            build_matrix(&traces, &corpus.seeds, WeightScheme::Size).map_err(|e| e.to_string())?;
        let ml = distill(&m, WeightScheme::Size);
        let tuples: Vec<_> = traces.iter().map(|t| t.tuples.as_ref()).collect();
        let cm = cmin_distill(&tuples, &corpus.seeds).map_err(|e| e.to_string())?;
        let bytes = |s: &Selection| {
            s.chosen
                .iter()
                .map(|&i| corpus.seeds[i].size_bytes)
                .sum::<u64>() as f64
        };
        ml_files += ml.len() as f64;
        cm_files += cm.len() as f64;
        ml_bytes += bytes(&ml);
        cm_bytes += bytes(&cm);
    }
    let k = corpora as f64;
    let summary = format!(
        "mean files {:.1} vs cmin {:.1}; mean bytes {:.0} vs cmin {:.0}",
        ml_files / k,
        cm_files / k,
        ml_bytes / k,
        cm_bytes / k
    );
    check(ml_files <= cm_files && ml_bytes <= cm_bytes, || {
        summary.clone()
    })?;
    Ok(summary)
}

fn peak_rss_kib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

fn performance() -> Outcome {
    const LIMIT: Duration = Duration::from_secs(60);
    const MEM_LIMIT_KIB: u64 = 2 * 1024 * 1024;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = sparse_matrix(&mut rng, 20_000, 65_536, 0.02);
    let start = Instant::now();
    let sel = distill(&m, WeightScheme::Size);
    let wall = start.elapsed();
    check(verify_cover(&m, &sel).is_ok(), || {
        "selection loses coverage".into()
    })?;
    let peak = peak_rss_kib().ok_or("peak memory unavailable")?;
    let summary = format!(
        "20000x65536 in {:.1}s, peak {} MiB, {} seeds chosen",
        wall.as_secs_f64(),
        peak / 1024,
        sel.len()
    );
    check(wall < LIMIT && peak < MEM_LIMIT_KIB, || summary.clone())?;
    Ok(summary)
}

fn main() {
    let instances = small_instances();
    let criteria: Vec<Criterion> = vec![
        ("fixture A0", Box::new(fixture_unweighted)),
        ("fixture A0w", Box::new(fixture_weighted)),
        ("reduction lemmas", Box::new(|| lemma_suite(&instances))),
        (
            "zero-cost optimality",
            Box::new(|| zero_cost_optimality(&instances)),
        ),
        ("coverage preservation", Box::new(coverage_preservation)),
        ("determinism and invariances", Box::new(invariances)),
        ("format round-trips", Box::new(formats)),
        ("size ordering vs cmin", Box::new(size_ordering)),
        ("performance", Box::new(performance)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
