//! JSON documents written by the command line.
//!
//! Every struct rejects unknown fields, so reading a document back through
//! these types doubles as schema validation.

use std::fs;
use std::path::Path;

use normat_core::costmodel::{CountPrediction, Decision, DecisionThresholds};
use normat_core::ml::{Model, ModelOutput, TrainConfig};
use normat_core::{DenseMatrix, OpCounter, ShapeStats};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};

/// Base-table dimensions and redundancy ratios of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dims {
    pub kind: String,
    pub n_s: usize,
    pub n_r: Vec<usize>,
    pub d_s: usize,
    pub d_r: Vec<usize>,
    pub join_rows: usize,
    pub tuple_ratio: f64,
    pub feature_ratio: f64,
}

impl From<&ShapeStats> for Dims {
    fn from(s: &ShapeStats) -> Self {
        Dims {
            kind: s.kind.as_str().into(),
            n_s: s.n_s,
            n_r: s.n_r.clone(),
            d_s: s.d_s,
            d_r: s.d_r.clone(),
            join_rows: s.join_rows,
            tuple_ratio: s.tuple_ratio,
            feature_ratio: s.feature_ratio,
        }
    }
}

/// Scalar multiplies and additions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Counts {
    pub multiplies: u64,
    pub additions: u64,
}

impl From<OpCounter> for Counts {
    fn from(c: OpCounter) -> Self {
        Counts { multiplies: c.multiplies, additions: c.additions }
    }
}

/// A pair of values for the materialized and factorized executions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerMode<T> {
    pub materialized: T,
    pub factorized: T,
}

/// One benchmarked operator or algorithm.
///
/// `times_ms`, `median_ms` and `speedup` are absent when the correctness
/// check failed: a wrong answer is not timed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRecord {
    pub op: String,
    pub dims: Dims,
    pub warmup: usize,
    pub trials: usize,
    pub times_ms: Option<PerMode<Vec<f64>>>,
    pub median_ms: Option<PerMode<f64>>,
    /// Median materialized time over median factorized time.
    pub speedup: Option<f64>,
    pub max_rel_err: f64,
    pub passed: bool,
    pub counts: PerMode<Counts>,
    /// Verdict of the cost model with the thresholds in effect.
    pub decision: String,
    pub threads: usize,
}

impl BenchRecord {
    /// The record with every timing-dependent field cleared.
    pub fn without_timing(&self) -> BenchRecord {
        BenchRecord { times_ms: None, median_ms: None, speedup: None, ..self.clone() }
    }
}

/// A named dense array, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Array {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Array {
    pub fn new(name: &str, m: &DenseMatrix) -> Array {
        Array { name: name.into(), rows: m.rows(), cols: m.cols(), data: m.data().to_vec() }
    }

    pub fn to_matrix(&self) -> Option<DenseMatrix> {
        DenseMatrix::from_vec(self.rows, self.cols, self.data.clone()).ok()
    }
}

/// Learned parameters as flat arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelArrays {
    pub kind: String,
    pub arrays: Vec<Array>,
    /// Cluster index of every row (K-Means only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<usize>>,
}

impl From<&Model> for ModelArrays {
    fn from(m: &Model) -> Self {
        match m {
            Model::Weights(w) => {
                ModelArrays { kind: "weights".into(), arrays: vec![Array::new("w", w)], assignment: None }
            }
            Model::Clusters { centroids, assignment } => ModelArrays {
                kind: "clusters".into(),
                arrays: vec![Array::new("centroids", centroids)],
                assignment: Some(assignment.clone()),
            },
            Model::Factors { w, h } => ModelArrays {
                kind: "factors".into(),
                arrays: vec![Array::new("w", w), Array::new("h", h)],
                assignment: None,
            },
        }
    }
}

/// Training hyper-parameters as run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub iterations: usize,
    pub step_size: f64,
    pub k: usize,
    pub rank: usize,
    pub seed: u64,
    pub tau: f64,
    pub rho: f64,
}

impl ConfigEcho {
    pub fn new(cfg: &TrainConfig, thresholds: DecisionThresholds) -> ConfigEcho {
        ConfigEcho {
            iterations: cfg.iterations,
            step_size: cfg.step_size,
            k: cfg.k,
            rank: cfg.rank,
            seed: cfg.seed,
            tau: thresholds.tau,
            rho: thresholds.rho,
        }
    }
}

/// Result of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainReport {
    pub algorithm: String,
    /// Requested execution mode.
    pub mode: String,
    /// Path actually taken.
    pub decision: String,
    pub dims: Dims,
    pub config: ConfigEcho,
    pub objective: Vec<f64>,
    pub model: ModelArrays,
    pub counts: Counts,
    pub time_ms: f64,
    pub threads: usize,
}

impl TrainReport {
    pub fn from_output(
        out: &ModelOutput,
        mode: &str,
        decision: Decision,
        dims: Dims,
        config: ConfigEcho,
        time_ms: f64,
        threads: usize,
    ) -> TrainReport {
        TrainReport {
            algorithm: out.algorithm.as_str().into(),
            mode: mode.into(),
            decision: decision.as_str().into(),
            dims,
            config,
            objective: out.objective.clone(),
            model: ModelArrays::from(&out.model),
            counts: out.counter.into(),
            time_ms,
            threads,
        }
    }

    pub fn without_timing(&self) -> TrainReport {
        TrainReport { time_ms: 0.0, ..self.clone() }
    }
}

/// Predicted arithmetic of one operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpPrediction {
    pub op: String,
    pub standard: f64,
    pub factorized: f64,
    pub predicted_speedup: f64,
}

impl From<&CountPrediction> for OpPrediction {
    fn from(p: &CountPrediction) -> Self {
        OpPrediction {
            op: p.op.as_str().into(),
            standard: p.standard,
            factorized: p.factorized,
            predicted_speedup: p.predicted_speedup,
        }
    }
}

/// Dataset statistics, count predictions and the dispatch verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplainReport {
    pub dims: Dims,
    pub tau: f64,
    pub rho: f64,
    pub decision: String,
    pub operators: Vec<OpPrediction>,
}

/// Writes `value` as pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(DataError::io(dir))?;
            }
            fs::write(p, text).map_err(DataError::io(p))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes a plot-ready CSV summary of benchmark records.
pub fn write_bench_csv(path: &Path, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(DataError::csv(path))?;
    let header = [
        "op",
        "kind",
        "n_s",
        "n_r",
        "d_s",
        "d_r",
        "tuple_ratio",
        "feature_ratio",
        "median_materialized_ms",
        "median_factorized_ms",
        "speedup",
        "max_rel_err",
        "passed",
    ];
    w.write_record(header).map_err(DataError::csv(path))?;
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        let d = &r.dims;
        w.write_record([
            r.op.clone(),
            d.kind.clone(),
            d.n_s.to_string(),
            join(&d.n_r),
            d.d_s.to_string(),
            join(&d.d_r),
            d.tuple_ratio.to_string(),
            d.feature_ratio.to_string(),
            opt(r.median_ms.as_ref().map(|m| m.materialized)),
            opt(r.median_ms.as_ref().map(|m| m.factorized)),
            opt(r.speedup),
            format!("{:e}", r.max_rel_err),
            r.passed.to_string(),
        ])
        .map_err(DataError::csv(path))?;
    }
    w.flush().map_err(DataError::io(path))
}

/// Reads and validates a JSON document.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(DataError::io(path))?;
    serde_json::from_str(&text).map_err(|source| DataError::Json { path: path.into(), source })
}
