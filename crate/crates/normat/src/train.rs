//! Training runs on a loaded dataset.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use normat_core::costmodel::{AutoMatrix, Decision, DecisionThresholds};
use normat_core::ml::{self, Algorithm, DataMatrix, ModelOutput, TrainConfig};
use normat_core::NumericMatrix;

use crate::dataio::Dataset;
use crate::error::{DataError, Result};
use crate::report::{ConfigEcho, Dims, TrainReport};

/// Execution path requested for a training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Factorized,
    Materialized,
    /// Let the cost model decide.
    #[default]
    Auto,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Factorized => "factorized",
            Mode::Materialized => "materialized",
            Mode::Auto => "auto",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "factorized" => Ok(Mode::Factorized),
            "materialized" => Ok(Mode::Materialized),
            "auto" => Ok(Mode::Auto),
            _ => Err(format!("unknown mode `{s}`; expected factorized, materialized or auto")),
        }
    }
}

pub const ALGORITHM_NAMES: [&str; 5] = ["logreg", "linreg", "linreg_gd", "kmeans", "gnmf"];

/// Parses an algorithm name as printed by [`Algorithm::as_str`].
pub fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    Ok(match s {
        "logreg" => Algorithm::LogisticRegression,
        "linreg" => Algorithm::LinearRegressionNormal,
        "linreg_gd" => Algorithm::LinearRegressionGd,
        "kmeans" => Algorithm::KMeans,
        "gnmf" => Algorithm::Gnmf,
        _ => return Err(format!("unknown algorithm `{s}`; expected one of {}", ALGORITHM_NAMES.join(", "))),
    })
}

/// Runs `algorithm` on any data matrix. Supervised algorithms need `y`.
pub fn run_algorithm<M: DataMatrix>(
    algorithm: Algorithm,
    t: &M,
    y: Option<&NumericMatrix>,
    cfg: &TrainConfig,
) -> Result<ModelOutput> {
    let target = || y.ok_or_else(|| DataError::InvalidParams(format!("{} needs a target column", algorithm.as_str())));
    Ok(match algorithm {
        Algorithm::LogisticRegression => ml::logistic_gd(t, target()?, cfg)?,
        Algorithm::LinearRegressionNormal => ml::linreg_normal(t, target()?)?,
        Algorithm::LinearRegressionGd => ml::linreg_gd(t, target()?, cfg)?,
        Algorithm::KMeans => ml::kmeans(t, cfg)?,
        Algorithm::Gnmf => ml::gnmf(t, cfg)?,
    })
}

/// Trains on `data` along the path selected by `mode`.
///
/// Only the algorithm itself is timed; materializing the join (when the
/// materialized path is taken) happens before the clock starts.
pub fn train(
    data: &Dataset,
    algorithm: Algorithm,
    mode: Mode,
    cfg: &TrainConfig,
    thresholds: DecisionThresholds,
    threads: usize,
) -> Result<TrainReport> {
    let stats = data.matrix.stats();
    let nm = data.matrix.clone();
    let auto = match mode {
        Mode::Factorized => AutoMatrix::with_decision(nm, Decision::Factorized),
        Mode::Materialized => AutoMatrix::with_decision(nm, Decision::Materialized),
        Mode::Auto => AutoMatrix::new(nm, thresholds),
    };
    log::info!(
        "{}: TR={:.3} FR={:.3}, running {}",
        algorithm.as_str(),
        stats.tuple_ratio,
        stats.feature_ratio,
        auto.decision()
    );
    let start = Instant::now();
    let out = run_algorithm(algorithm, &auto, data.target.as_ref(), cfg)?;
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(TrainReport::from_output(
        &out,
        mode.as_str(),
        auto.decision(),
        Dims::from(&stats),
        ConfigEcho::new(cfg, thresholds),
        time_ms,
        threads,
    ))
}
