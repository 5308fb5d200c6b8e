//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! The timing criteria build their datasets with the synthetic generators,
//! load them back through the schema loader, and time both execution paths
//! with the benchmark harness, exactly as the command line does.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;
#[path = "../../core/tests/support/traces.rs"]
mod traces;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use normat::bench::{bench_algo, bench_op, BenchOperator, BenchOptions};
use normat::dataio::{self, Dataset, SynthParams, SCHEMA_FILE};
use normat::report::{BenchRecord, TrainReport};
use normat_core::costmodel::{
    decide, execute_factorized, execute_standard, predict_counts, Decision, DecisionThresholds, ExtraDims, OpRequest,
    OperatorId, ScalarFunction,
};
use normat_core::kernel::{self, ScalarOp};
use normat_core::ml::{self, Algorithm, Model, TrainConfig};
use normat_core::normmat::build_pkfk;
use normat_core::normmat::synth::{random_dense, random_normalized, random_surjective_targets, RandomShape};
use normat_core::rewrite::{self, CrossprodMethod};
use normat_core::{IndicatorMatrix, JoinKind, NormalizedMatrix, NumericMatrix, OpCounter, ShapeStats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [JoinKind; 4] = [JoinKind::PkFk, JoinKind::Star, JoinKind::ManyToMany, JoinKind::MultiManyToMany];

/// Randomized matrices in the oracle sweep.
const ORACLE_CASES: usize = 1000;
/// Random DMM operand pairs checked alongside the single-matrix operators.
const ORACLE_DMM_PAIRS: usize = 100;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(120);

/// Allowed relative gap between measured and predicted arithmetic.
const COUNT_TOLERANCE: f64 = 0.15;

/// Repetitions of every timed path; the median is compared.
const TIMING_TRIALS: usize = 7;
const TIMING_WARMUP: usize = 2;
const LOGREG_ITERATIONS: usize = 10;
const LOGREG_MIN_SPEEDUP_FR1: f64 = 1.5;
const LOGREG_MIN_SPEEDUP_FR4: f64 = 2.8;
const LOGREG_TIME_LIMIT: Duration = Duration::from_secs(600);
const CROSSPROD_MIN_SPEEDUP: f64 = 3.0;
/// The efficient cross-product may be at most this much slower than the naive one.
const CROSSPROD_NAIVE_SLACK: f64 = 1.05;
const MN_MIN_SPEEDUP: f64 = 10.0;

const TRACE_FIXTURES: usize = 10;
const TRACE_ITERATIONS: usize = 20;

const PENROSE_TOLERANCE: f64 = 1e-8;
const PENROSE_CASES: usize = 60;
const DMM_BOUND_PAIRS: usize = 200;
const RANK_CASES: usize = 20;
const GNMF_SLACK: f64 = 1e-9;
const STRUCTURE_CASES: usize = 20;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Outcome {
        Outcome { passed, detail: detail.into() }
    }
}

fn generate_pkfk(dir: &Path, n_s: usize, n_r: usize, d_s: usize, d_r: usize, seed: u64) -> Dataset {
    let params = SynthParams { n_s, n_r, d_s, d_r, n_u: None, density: 1.0, seed };
    dataio::gen_pkfk(&params, dir).expect("generate PK-FK data");
    dataio::load(&dir.join(SCHEMA_FILE)).expect("load PK-FK data")
}

fn timing_options(seed: u64) -> BenchOptions {
    BenchOptions { warmup: TIMING_WARMUP, trials: TIMING_TRIALS, seed, ..BenchOptions::default() }
}

fn speedup_of(r: &BenchRecord) -> f64 {
    r.speedup.unwrap_or(0.0)
}

fn oracle_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut report = oracle::OracleReport::default();
    for case in 0..ORACLE_CASES {
        let kind = KINDS[case % KINDS.len()];
        let nm = random_normalized(&mut rng, kind, RandomShape::default());
        // alternate the transpose state within every kind
        let nm = if (case / KINDS.len()) % 2 == 1 { nm.transpose() } else { nm };
        report.merge(oracle::check_operators(&nm, &mut rng));
    }
    for _ in 0..ORACLE_DMM_PAIRS {
        report.merge(oracle::check_dmm(&mut rng, 64, 6));
    }
    let elapsed = start.elapsed();
    for m in report.mismatches.iter().take(5) {
        eprintln!("  oracle mismatch: {} error {:e} > {:e}", m.op, m.error, m.tolerance);
    }
    Outcome::new(
        report.mismatches.is_empty() && elapsed <= ORACLE_TIME_LIMIT,
        format!(
            "{ORACLE_CASES} matrices + {ORACLE_DMM_PAIRS} DMM pairs, {} checks, {} mismatches, worst {:.1e} (ginv {:.1e}), {:.1}s",
            report.checks,
            report.mismatches.len(),
            report.worst,
            report.worst_ginv,
            elapsed.as_secs_f64()
        ),
    )
}

fn count_request(op: OperatorId, nm: &NormalizedMatrix, extra: ExtraDims, rng: &mut impl Rng) -> Option<OpRequest> {
    Some(match op {
        OperatorId::ScalarMult => OpRequest::Scalar { op: ScalarOp::Mul, x: 3.0 },
        OperatorId::ScalarAdd => OpRequest::Scalar { op: ScalarOp::Add, x: 3.0 },
        OperatorId::ScalarFn => OpRequest::Function(ScalarFunction::Exp),
        OperatorId::RowSums => OpRequest::RowSums,
        OperatorId::ColSums => OpRequest::ColSums,
        OperatorId::Sum => OpRequest::Sum,
        OperatorId::Lmm => OpRequest::Lmm(random_dense(rng, nm.ncols(), extra.d_x).into()),
        OperatorId::Rmm => OpRequest::Rmm(random_dense(rng, extra.n_x, nm.nrows()).into()),
        OperatorId::Crossprod => OpRequest::Crossprod(CrossprodMethod::Efficient),
        OperatorId::Ginv => return None,
    })
}

fn operation_counts() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (n_s, n_r, d_s, d_r) = (100_000, 1_000, 20, 80);
    let s = random_dense(&mut rng, n_s, d_s).into();
    let r = random_dense(&mut rng, n_r, d_r).into();
    let k = IndicatorMatrix::new(n_r, random_surjective_targets(&mut rng, n_s, n_r)).unwrap();
    let nm = NormalizedMatrix::pkfk(s, k, r).unwrap();
    let t = nm.materialize();
    let extra = ExtraDims { d_x: 10, n_x: 10 };

    let (mut compared, mut worst, mut failures) = (0, 0.0_f64, Vec::new());
    for op in OperatorId::ALL {
        let Some(req) = count_request(op, &nm, extra, &mut rng) else { continue };
        let prediction = predict_counts(op, &nm.stats(), extra).unwrap();
        let mut fact = OpCounter::new();
        execute_factorized(&nm, &req, &mut fact).unwrap();
        let mut std = OpCounter::new();
        execute_standard(&t, &req, &mut std).unwrap();
        // additive operators perform no multiplies; their formulas count additions
        let measure = |c: &OpCounter| match op {
            OperatorId::ScalarAdd | OperatorId::RowSums | OperatorId::ColSums | OperatorId::Sum => c.total() as f64,
            _ => c.multiplies as f64,
        };
        for (label, measured, predicted) in
            [("standard", measure(&std), prediction.standard), ("factorized", measure(&fact), prediction.factorized)]
        {
            let gap = (measured - predicted).abs() / predicted;
            compared += 1;
            worst = worst.max(gap);
            if gap.is_nan() || gap > COUNT_TOLERANCE {
                failures.push(format!("{op} {label}: measured {measured}, predicted {predicted}"));
            }
        }
    }
    for f in &failures {
        eprintln!("  count mismatch: {f}");
    }
    Outcome::new(
        failures.is_empty(),
        format!("{compared} counts within {:.0}% (worst gap {:.2}%)", COUNT_TOLERANCE * 100.0, worst * 100.0),
    )
}

fn logistic_sweep(scratch: &Path) -> (Outcome, Option<Dataset>) {
    let start = Instant::now();
    let cfg = TrainConfig { iterations: LOGREG_ITERATIONS, ..TrainConfig::default() };
    let mut speedups = Vec::new();
    let mut all_correct = true;
    let mut widest = None;
    for fr in 1..=4 {
        let dir = scratch.join(format!("logreg_fr{fr}"));
        let data = generate_pkfk(&dir, 200_000, 10_000, 20, 20 * fr, 30 + fr as u64);
        let t = data.matrix.materialize();
        let record = bench_algo(
            &data.matrix,
            &t,
            data.target.as_ref(),
            Algorithm::LogisticRegression,
            &cfg,
            &timing_options(fr as u64),
        )
        .expect("logistic regression benchmark");
        drop(t);
        all_correct &= record.passed;
        let m = record.median_ms.as_ref();
        eprintln!(
            "  logreg FR={fr}: materialized {:.1} ms, factorized {:.1} ms, speedup {:.2}x, deviation {:.1e}",
            m.map_or(f64::NAN, |m| m.materialized),
            m.map_or(f64::NAN, |m| m.factorized),
            speedup_of(&record),
            record.max_rel_err
        );
        speedups.push(speedup_of(&record));
        if fr == 4 {
            widest = Some(data);
        }
    }
    let elapsed = start.elapsed();
    let increasing = speedups.windows(2).all(|w| w[1] > w[0]);
    let passed = all_correct
        && speedups[0] >= LOGREG_MIN_SPEEDUP_FR1
        && increasing
        && speedups[3] >= LOGREG_MIN_SPEEDUP_FR4
        && elapsed <= LOGREG_TIME_LIMIT;
    let shown: Vec<String> = speedups.iter().map(|s| format!("{s:.2}x")).collect();
    let detail = format!(
        "speedups FR=1..4: {} (need >= {LOGREG_MIN_SPEEDUP_FR1}x, increasing, >= {LOGREG_MIN_SPEEDUP_FR4}x), {:.0}s",
        shown.join(", "),
        elapsed.as_secs_f64()
    );
    (Outcome::new(passed, detail), widest)
}

fn crossprod_speedup(data: &Dataset) -> Outcome {
    let stats = data.matrix.stats();
    let t = data.matrix.materialize();
    let opts = timing_options(4);
    let efficient = bench_op(&data.matrix, &t, BenchOperator::Crossprod(CrossprodMethod::Efficient), &opts)
        .expect("crossprod benchmark");
    let naive = bench_op(&data.matrix, &t, BenchOperator::Crossprod(CrossprodMethod::Naive), &opts)
        .expect("crossprod benchmark");
    let fact_ms = |r: &BenchRecord| r.median_ms.as_ref().map_or(f64::INFINITY, |m| m.factorized);
    let (eff_ms, naive_ms) = (fact_ms(&efficient), fact_ms(&naive));
    let passed = efficient.passed
        && naive.passed
        && speedup_of(&efficient) >= CROSSPROD_MIN_SPEEDUP
        && eff_ms <= CROSSPROD_NAIVE_SLACK * naive_ms;
    Outcome::new(
        passed,
        format!(
            "TR={:.0} FR={:.0}: efficient {:.2}x, naive {:.2}x, efficient {eff_ms:.1} ms vs naive {naive_ms:.1} ms",
            stats.tuple_ratio,
            stats.feature_ratio,
            speedup_of(&efficient),
            speedup_of(&naive)
        ),
    )
}

fn many_to_many_lmm(scratch: &Path) -> Outcome {
    let dir = scratch.join("mn");
    let params = SynthParams { n_s: 20_000, n_r: 20_000, d_s: 50, d_r: 50, n_u: Some(200), density: 1.0, seed: 5 };
    dataio::gen_mn(&params, &dir).expect("generate M:N data");
    let data = dataio::load(&dir.join(SCHEMA_FILE)).expect("load M:N data");
    let t = data.matrix.materialize();
    let record = bench_op(&data.matrix, &t, BenchOperator::Lmm, &timing_options(5)).expect("LMM benchmark");
    let m = record.median_ms.as_ref();
    Outcome::new(
        record.passed && speedup_of(&record) >= MN_MIN_SPEEDUP,
        format!(
            "join rows {}, d_X={}: materialized {:.1} ms, factorized {:.1} ms, speedup {:.2}x",
            record.dims.join_rows,
            BenchOptions::default().d_x,
            m.map_or(f64::NAN, |m| m.materialized),
            m.map_or(f64::NAN, |m| m.factorized),
            speedup_of(&record)
        ),
    )
}

fn decision_grid() -> Outcome {
    let (mut total, mut matched) = (0, 0);
    for tr in 1..=10 {
        for fr in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let stats = ShapeStats::from_dims(tr * 1000, 1000, 4, (fr * 4.0) as usize);
            let expected = if (tr as f64) < 5.0 || fr < 1.0 { Decision::Materialized } else { Decision::Factorized };
            let got = decide(&stats, DecisionThresholds::default());
            total += 1;
            if got == expected {
                matched += 1;
            } else {
                eprintln!("  decision TR={tr} FR={fr}: got {got}, expected {expected}");
            }
        }
    }
    Outcome::new(matched == total && total == 50, format!("{matched}/{total} cases"))
}

fn trace_equality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut runs, mut worst, mut failures) = (0, 0.0_f64, 0);
    for algorithm in traces::ALGORITHMS {
        for fixture in 0..TRACE_FIXTURES {
            let kind = KINDS[fixture % KINDS.len()];
            let nm = random_normalized(&mut rng, kind, RandomShape::default());
            let (a, b) = traces::run_both(algorithm, &nm, TRACE_ITERATIONS, &mut rng);
            let drift = traces::trace_divergence(&a, &b);
            runs += 1;
            worst = worst.max(drift);
            if drift.is_nan() || drift > traces::TRACE_TOLERANCE || a.states.len() != TRACE_ITERATIONS {
                failures += 1;
                eprintln!("  trace {algorithm} fixture {fixture} ({kind:?}): drift {drift:e}");
            }
        }
    }
    Outcome::new(
        failures == 0,
        format!("{runs} runs x {TRACE_ITERATIONS} iterations, worst relative drift {worst:.1e}"),
    )
}

/// Largest violation of the four Penrose conditions, relative to the
/// magnitudes involved.
fn penrose_violation(t: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    let scale = t.norm().max(1.0) * p.norm().max(1.0);
    let tp = t * p;
    let pt = p * t;
    [
        (&tp * t - t).norm() / (scale * t.norm().max(1.0)),
        (&pt * p - p).norm() / (scale * p.norm().max(1.0)),
        (&tp - tp.transpose()).norm() / scale,
        (&pt - pt.transpose()).norm() / scale,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn structural_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut problems = Vec::new();

    let mut worst_penrose = 0.0_f64;
    for case in 0..PENROSE_CASES {
        let nm = random_normalized(&mut rng, KINDS[case % KINDS.len()], RandomShape::default());
        let nm = if case % 2 == 1 { nm.transpose() } else { nm };
        let p = rewrite::ginv(&nm, &mut OpCounter::new()).unwrap();
        let v = penrose_violation(&oracle::to_na(&nm.materialize()), &oracle::to_na(&p));
        worst_penrose = worst_penrose.max(v);
        if v.is_nan() || v > PENROSE_TOLERANCE {
            problems.push(format!("Penrose violation {v:e} on case {case}"));
        }
    }

    for pair in 0..DMM_BOUND_PAIRS {
        let n_s = rng.random_range(2..=64);
        let (n_ra, n_rb) = (rng.random_range(1..=n_s), rng.random_range(1..=n_s));
        let make = |rng: &mut ChaCha8Rng, n_r: usize| {
            let (d_s, d_r) = (rng.random_range(1..=4), rng.random_range(1..=4));
            let s = random_dense(rng, n_s, d_s).into();
            let r = random_dense(rng, n_r, d_r).into();
            let k = IndicatorMatrix::new(n_r, random_surjective_targets(rng, n_s, n_r)).unwrap();
            NormalizedMatrix::pkfk(s, k, r).unwrap()
        };
        let (a, b) = (make(&mut rng, n_ra), make(&mut rng, n_rb));
        let p = rewrite::dmm_overlap(&a, &b, &mut OpCounter::new()).unwrap();
        let total: f64 = p.to_dense().data().iter().sum();
        if p.nnz() < n_ra.max(n_rb) || p.nnz() > n_s || total != n_s as f64 {
            problems.push(format!("DMM pair {pair}: nnz {} outside [{}, {n_s}]", p.nnz(), n_ra.max(n_rb)));
        }
    }

    // four entity rows, one entity feature, two attribute rows of three features
    let mut max_rank = 0;
    for case in 0..RANK_CASES {
        let s: NumericMatrix = random_dense(&mut rng, 4, 1).into();
        let r: NumericMatrix = random_dense(&mut rng, 2, 3).into();
        let fk: Vec<usize> = if case == 0 {
            vec![1, 2, 1, 2]
        } else {
            random_surjective_targets(&mut rng, 4, 2).into_iter().map(|t| t + 1).collect()
        };
        let nm = build_pkfk(s, &fk, r).unwrap();
        let t = nm.materialize().to_dense();
        let rank = kernel::numeric_rank(&t).unwrap();
        max_rank = max_rank.max(rank);
        if t.shape() != (4, 4) || rank > 3 {
            problems.push(format!("rank construction {case}: shape {:?}, rank {rank}", t.shape()));
        }
    }

    for case in 0..STRUCTURE_CASES {
        let nm = random_normalized(&mut rng, KINDS[case % KINDS.len()], RandomShape::default());
        let nonneg = rewrite::scalar_fn(&nm, f64::abs, &mut OpCounter::new()).unwrap();
        let cfg = TrainConfig { iterations: 50, rank: 2, seed: case as u64, ..TrainConfig::default() };
        let out = ml::gnmf(&nonneg, &cfg).unwrap();
        if let Some(w) =
            out.objective.windows(2).find(|w| w[1].is_nan() || w[1] > w[0] + GNMF_SLACK * w[0].abs().max(1.0))
        {
            problems.push(format!("GNMF objective rose from {} to {} on case {case}", w[0], w[1]));
        }

        let k = 3.min(nm.nrows());
        let cfg = TrainConfig { iterations: 10, k, seed: case as u64, record_states: true, ..TrainConfig::default() };
        let out = ml::kmeans(&nm, &cfg).unwrap();
        for state in &out.states {
            let Model::Clusters { assignment, .. } = state else {
                problems.push("K-Means state without assignment".into());
                continue;
            };
            let mut indicator = DMatrix::<f64>::zeros(assignment.len(), k);
            for (i, &j) in assignment.iter().enumerate() {
                if j < k {
                    indicator[(i, j)] = 1.0;
                }
            }
            let rows = indicator.column_sum();
            if assignment.len() != nm.nrows() || rows.iter().any(|&s| s != 1.0) {
                problems.push(format!("K-Means assignment rows do not sum to 1 on case {case}"));
                break;
            }
        }
    }

    for p in problems.iter().take(5) {
        eprintln!("  structural: {p}");
    }
    Outcome::new(
        problems.is_empty(),
        format!(
            "Penrose worst {worst_penrose:.1e} over {PENROSE_CASES}, {DMM_BOUND_PAIRS} DMM bounds, rank <= {max_rank} over {RANK_CASES}, \
             GNMF/K-Means on {STRUCTURE_CASES}: {} problems",
            problems.len()
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_normat"))
        .args(args)
        .env_remove("MORPHEUS_THREADS")
        .output()
        .map_err(|e| e.to_string())?;
    match out.status.code() {
        Some(0) => Ok(out.stdout),
        code => Err(format!("{args:?} exited with {code:?}: {}", String::from_utf8_lossy(&out.stderr))),
    }
}

fn cli_pipeline_once(scratch: &Path, tag: &str) -> Result<(Vec<u8>, Vec<BenchRecord>, TrainReport), String> {
    let data = scratch.join(format!("cli_{tag}"));
    let data = data.to_str().ok_or("non UTF-8 path")?;
    run_cli(&["gen", "pkfk", "--ns", "5e3", "--nr", "250", "--ds", "4", "--dr", "16", "--seed", "11", "--out", data])?;
    let entity = std::fs::read(Path::new(data).join("entity.csv")).map_err(|e| e.to_string())?;
    let bench = run_cli(&[
        "bench",
        "op",
        "--data",
        data,
        "--op",
        "crossprod,lmm,rmm,col_sums",
        "--trials",
        "2",
        "--seed",
        "3",
    ])?;
    let bench: Vec<BenchRecord> = serde_json::from_slice(&bench).map_err(|e| format!("bench JSON: {e}"))?;
    let train =
        run_cli(&["train", "--data", data, "--algo", "logreg", "--iters", "5", "--step", "1e-4", "--seed", "3"])?;
    let train: TrainReport = serde_json::from_slice(&train).map_err(|e| format!("train JSON: {e}"))?;
    Ok((entity, bench, train))
}

fn cli_pipeline(scratch: &Path) -> Outcome {
    let runs = cli_pipeline_once(scratch, "a").and_then(|a| cli_pipeline_once(scratch, "b").map(|b| (a, b)));
    match runs {
        Err(e) => Outcome::new(false, e),
        Ok(((data_a, bench_a, train_a), (data_b, bench_b, train_b))) => {
            let strip = |v: &[BenchRecord]| v.iter().map(BenchRecord::without_timing).collect::<Vec<_>>();
            let same_data = data_a == data_b;
            let same_bench = strip(&bench_a) == strip(&bench_b);
            let same_train = train_a.without_timing() == train_b.without_timing();
            let correct = bench_a.iter().all(|r| r.passed);
            Outcome::new(
                same_data && same_bench && same_train && correct,
                format!(
                    "exit 0 and valid JSON; identical data {same_data}, bench {same_bench}, train {same_train}; \
                     {} operators correct {correct}",
                    bench_a.len()
                ),
            )
        }
    }
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let mut results: Vec<(usize, Outcome)> = Vec::new();
    let mut report = |n: usize, o: Outcome| {
        println!("criterion {n}: {} - {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, o));
    };

    report(1, oracle_suite());
    report(2, operation_counts());
    let (sweep, widest) = logistic_sweep(scratch.path());
    report(3, sweep);
    // the FR=4 sweep dataset is the TR=20, FR=4 crossprod dataset
    let wide = widest.unwrap_or_else(|| generate_pkfk(&scratch.path().join("crossprod"), 200_000, 10_000, 20, 80, 34));
    report(4, crossprod_speedup(&wide));
    drop(wide);
    report(5, many_to_many_lmm(scratch.path()));
    report(6, decision_grid());
    report(7, trace_equality());
    report(8, structural_checks());
    report(9, cli_pipeline(scratch.path()));

    let failed: Vec<usize> = results.iter().filter(|(_, o)| !o.passed).map(|(n, _)| *n).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
