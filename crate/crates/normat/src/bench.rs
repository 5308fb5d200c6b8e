//! Median-of-trials timing of the materialized and factorized executions.
//!
//! Each benchmark first runs both paths once and compares their outputs; a
//! deviation above [`CORRECTNESS_TOLERANCE`] fails the record and nothing is
//! timed. The join is materialized once, outside the timed region.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use normat_core::costmodel::{decide, execute_factorized, execute_standard, DecisionThresholds, OpRequest};
use normat_core::kernel::ScalarOp;
use normat_core::ml::{Algorithm, ModelOutput, TrainConfig};
use normat_core::normmat::synth::random_dense;
use normat_core::rewrite::CrossprodMethod;
use normat_core::{DenseMatrix, NormalizedMatrix, NumericMatrix, OpCounter};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{DataError, Result};
use crate::report::{BenchRecord, Counts, Dims, PerMode};
use crate::train::run_algorithm;

/// Largest relative deviation between the two paths that still passes.
pub const CORRECTNESS_TOLERANCE: f64 = 1e-6;

/// Operators available to `bench op`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchOperator {
    ScalarMult,
    ScalarAdd,
    ScalarFn,
    RowSums,
    ColSums,
    Sum,
    Lmm,
    Rmm,
    Crossprod(CrossprodMethod),
    Gram,
    Ginv,
}

impl BenchOperator {
    pub const NAMES: [&'static str; 12] = [
        "scalar_mult",
        "scalar_add",
        "scalar_fn",
        "row_sums",
        "col_sums",
        "sum",
        "lmm",
        "rmm",
        "crossprod",
        "crossprod_naive",
        "gram",
        "ginv",
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BenchOperator::ScalarMult => "scalar_mult",
            BenchOperator::ScalarAdd => "scalar_add",
            BenchOperator::ScalarFn => "scalar_fn",
            BenchOperator::RowSums => "row_sums",
            BenchOperator::ColSums => "col_sums",
            BenchOperator::Sum => "sum",
            BenchOperator::Lmm => "lmm",
            BenchOperator::Rmm => "rmm",
            BenchOperator::Crossprod(CrossprodMethod::Efficient) => "crossprod",
            BenchOperator::Crossprod(CrossprodMethod::Naive) => "crossprod_naive",
            BenchOperator::Gram => "gram",
            BenchOperator::Ginv => "ginv",
        }
    }
}

impl fmt::Display for BenchOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BenchOperator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "scalar_mult" => BenchOperator::ScalarMult,
            "scalar_add" => BenchOperator::ScalarAdd,
            "scalar_fn" => BenchOperator::ScalarFn,
            "row_sums" => BenchOperator::RowSums,
            "col_sums" => BenchOperator::ColSums,
            "sum" => BenchOperator::Sum,
            "lmm" => BenchOperator::Lmm,
            "rmm" => BenchOperator::Rmm,
            "crossprod" => BenchOperator::Crossprod(CrossprodMethod::Efficient),
            "crossprod_naive" => BenchOperator::Crossprod(CrossprodMethod::Naive),
            "gram" => BenchOperator::Gram,
            "ginv" => BenchOperator::Ginv,
            _ => return Err(format!("unknown operator `{s}`; expected one of {}", Self::NAMES.join(", "))),
        })
    }
}

/// Harness settings shared by operator and algorithm benchmarks.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchOptions {
    /// Untimed runs of each path before the trials (the correctness run
    /// counts as the first).
    pub warmup: usize,
    pub trials: usize,
    /// Columns of `X` in `T·X`.
    pub d_x: usize,
    /// Rows of `X` in `X·T`.
    pub n_x: usize,
    /// Seed of the random operands.
    pub seed: u64,
    pub thresholds: DecisionThresholds,
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            warmup: 2,
            trials: 5,
            d_x: 10,
            n_x: 10,
            seed: 0,
            thresholds: DecisionThresholds::default(),
            threads: 1,
        }
    }
}

impl BenchOptions {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.d_x == 0 || self.n_x == 0 {
            return Err(DataError::InvalidParams("trials, d_x and n_x must be at least 1".into()));
        }
        Ok(())
    }
}

/// Median of a non-empty sample.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `max|a − b| / max|b|`; infinite on a shape mismatch or a non-finite entry.
pub fn max_rel_err(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let mut diff = 0.0_f64;
    let mut scale = 0.0_f64;
    for (x, y) in a.data().iter().zip(b.data()) {
        if !(x.is_finite() && y.is_finite()) {
            return f64::INFINITY;
        }
        diff = diff.max((x - y).abs());
        scale = scale.max(y.abs());
    }
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs the warmups and trials of both paths and fills in the timing fields.
fn time_both<M, F>(record: &mut BenchRecord, opts: &BenchOptions, mut materialized: M, mut factorized: F) -> Result<()>
where
    M: FnMut() -> Result<()>,
    F: FnMut() -> Result<()>,
{
    for _ in 1..opts.warmup {
        materialized()?;
        factorized()?;
    }
    let mut times = PerMode { materialized: Vec::new(), factorized: Vec::new() };
    for _ in 0..opts.trials {
        let start = Instant::now();
        materialized()?;
        times.materialized.push(elapsed_ms(start));
        let start = Instant::now();
        factorized()?;
        times.factorized.push(elapsed_ms(start));
    }
    let medians = PerMode { materialized: median(&times.materialized), factorized: median(&times.factorized) };
    record.speedup = Some(medians.materialized / medians.factorized.max(1e-9));
    record.median_ms = Some(medians);
    record.times_ms = Some(times);
    Ok(())
}

fn base_record(name: &str, nm: &NormalizedMatrix, opts: &BenchOptions) -> BenchRecord {
    let stats = nm.stats();
    BenchRecord {
        op: name.into(),
        dims: Dims::from(&stats),
        warmup: opts.warmup,
        trials: opts.trials,
        times_ms: None,
        median_ms: None,
        speedup: None,
        max_rel_err: 0.0,
        passed: false,
        counts: PerMode { materialized: Counts::from(OpCounter::new()), factorized: Counts::from(OpCounter::new()) },
        decision: decide(&stats, opts.thresholds).as_str().into(),
        threads: opts.threads,
    }
}

fn request(op: BenchOperator, nm: &NormalizedMatrix, opts: &BenchOptions) -> OpRequest {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (n, d) = nm.shape();
    match op {
        BenchOperator::ScalarMult => OpRequest::Scalar { op: ScalarOp::Mul, x: 3.0 },
        BenchOperator::ScalarAdd => OpRequest::Scalar { op: ScalarOp::Add, x: 3.0 },
        BenchOperator::ScalarFn => OpRequest::Function(normat_core::costmodel::ScalarFunction::Exp),
        BenchOperator::RowSums => OpRequest::RowSums,
        BenchOperator::ColSums => OpRequest::ColSums,
        BenchOperator::Sum => OpRequest::Sum,
        BenchOperator::Lmm => OpRequest::Lmm(random_dense(&mut rng, d, opts.d_x).into()),
        BenchOperator::Rmm => OpRequest::Rmm(random_dense(&mut rng, opts.n_x, n).into()),
        BenchOperator::Crossprod(method) => OpRequest::Crossprod(method),
        BenchOperator::Gram => OpRequest::Gram,
        BenchOperator::Ginv => OpRequest::Ginv,
    }
}

/// Benchmarks one operator on `nm` against its materialization `t`.
pub fn bench_op(
    nm: &NormalizedMatrix,
    t: &NumericMatrix,
    op: BenchOperator,
    opts: &BenchOptions,
) -> Result<BenchRecord> {
    opts.validate()?;
    let req = request(op, nm, opts);
    let mut record = base_record(op.as_str(), nm, opts);

    let mut c_std = OpCounter::new();
    let standard = execute_standard(t, &req, &mut c_std)?.to_matrix().into_dense();
    let mut c_fact = OpCounter::new();
    let factorized = execute_factorized(nm, &req, &mut c_fact)?.to_matrix().into_dense();
    record.counts = PerMode { materialized: c_std.into(), factorized: c_fact.into() };
    record.max_rel_err = max_rel_err(&factorized, &standard);
    record.passed = record.max_rel_err <= CORRECTNESS_TOLERANCE;
    if !record.passed {
        log::error!("{op}: factorized result deviates by {:e} from the materialized one", record.max_rel_err);
        return Ok(record);
    }
    time_both(
        &mut record,
        opts,
        || execute_standard(t, &req, &mut OpCounter::new()).map(drop).map_err(Into::into),
        || execute_factorized(nm, &req, &mut OpCounter::new()).map(drop).map_err(Into::into),
    )?;
    Ok(record)
}

/// Largest relative deviation between two training runs: final parameters,
/// objective trace, and (K-Means) assignments, which must agree exactly.
pub fn output_deviation(a: &ModelOutput, b: &ModelOutput) -> f64 {
    use normat_core::ml::Model;
    if let (Model::Clusters { assignment: x, .. }, Model::Clusters { assignment: y, .. }) = (&a.model, &b.model) {
        if x != y {
            return f64::INFINITY;
        }
    }
    let (ma, mb) = (a.model.matrices(), b.model.matrices());
    if ma.len() != mb.len() || a.objective.len() != b.objective.len() {
        return f64::INFINITY;
    }
    let params = ma.iter().zip(&mb).map(|(x, y)| max_rel_err(x, y));
    let objective = max_rel_err(&DenseMatrix::column(a.objective.clone()), &DenseMatrix::column(b.objective.clone()));
    params.fold(objective, f64::max)
}

/// Benchmarks one training algorithm on `nm` against its materialization `t`.
pub fn bench_algo(
    nm: &NormalizedMatrix,
    t: &NumericMatrix,
    y: Option<&NumericMatrix>,
    algorithm: Algorithm,
    cfg: &TrainConfig,
    opts: &BenchOptions,
) -> Result<BenchRecord> {
    opts.validate()?;
    let mut record = base_record(algorithm.as_str(), nm, opts);
    let standard = run_algorithm(algorithm, t, y, cfg)?;
    let factorized = run_algorithm(algorithm, nm, y, cfg)?;
    record.counts = PerMode { materialized: standard.counter.into(), factorized: factorized.counter.into() };
    record.max_rel_err = output_deviation(&factorized, &standard);
    record.passed = record.max_rel_err <= CORRECTNESS_TOLERANCE;
    if !record.passed {
        log::error!(
            "{}: factorized model deviates by {:e} from the materialized one",
            algorithm.as_str(),
            record.max_rel_err
        );
        return Ok(record);
    }
    time_both(
        &mut record,
        opts,
        || run_algorithm(algorithm, t, y, cfg).map(drop),
        || run_algorithm(algorithm, nm, y, cfg).map(drop),
    )?;
    Ok(record)
}
