//! Runs each training algorithm on the factorized and the materialized form
//! of the same data and measures how far the per-iteration models drift.

#![allow(dead_code)]

use normat_core::kernel;
use normat_core::ml::{self, Model, ModelOutput, TrainConfig};
use normat_core::normmat::synth::random_dense;
use normat_core::{DenseMatrix, NormalizedMatrix, NumericMatrix};
use rand::Rng;

/// Relative tolerance on every recorded model state.
pub const TRACE_TOLERANCE: f64 = 1e-6;

pub const ALGORITHMS: [&str; 4] = ["logreg", "linreg_gd", "kmeans", "gnmf"];

fn rel_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let scale = b.max_abs().max(f64::MIN_POSITIVE);
    let diff = a.data().iter().zip(b.data()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()));
    if diff == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// Largest relative difference over all recorded states; infinite when the
/// traces differ in length or K-Means assignments disagree.
pub fn trace_divergence(a: &ModelOutput, b: &ModelOutput) -> f64 {
    if a.states.len() != b.states.len() || a.states.is_empty() {
        return f64::INFINITY;
    }
    let mut worst = 0.0_f64;
    for (sa, sb) in a.states.iter().zip(&b.states) {
        if let (Model::Clusters { assignment: x, .. }, Model::Clusters { assignment: y, .. }) = (sa, sb) {
            if x != y {
                return f64::INFINITY;
            }
        }
        for (ma, mb) in sa.matrices().into_iter().zip(sb.matrices()) {
            worst = worst.max(rel_diff(ma, mb));
        }
    }
    worst
}

/// Trains `algorithm` for `iterations` on both forms of `nm`.
pub fn run_both(
    algorithm: &str,
    nm: &NormalizedMatrix,
    iterations: usize,
    rng: &mut impl Rng,
) -> (ModelOutput, ModelOutput) {
    let materialized = nm.materialize();
    let n = nm.nrows();
    let sigma = kernel::singular_values(&materialized.to_dense()).unwrap()[0];
    let mut cfg = TrainConfig {
        iterations,
        step_size: 0.5 / (sigma * sigma),
        k: rng.random_range(1..=n.min(4)),
        rank: rng.random_range(1..=3),
        seed: rng.random(),
        record_states: true,
    };
    match algorithm {
        "logreg" => {
            let y: NumericMatrix =
                DenseMatrix::column((0..n).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()).into();
            cfg.step_size = 1.0 / (sigma * sigma);
            (ml::logistic_gd(nm, &y, &cfg).unwrap(), ml::logistic_gd(&materialized, &y, &cfg).unwrap())
        }
        "linreg_gd" => {
            let y: NumericMatrix = random_dense(rng, n, 1).into();
            (ml::linreg_gd(nm, &y, &cfg).unwrap(), ml::linreg_gd(&materialized, &y, &cfg).unwrap())
        }
        "kmeans" => (ml::kmeans(nm, &cfg).unwrap(), ml::kmeans(&materialized, &cfg).unwrap()),
        "gnmf" => {
            let mut c = normat_core::OpCounter::new();
            let nonneg = normat_core::rewrite::scalar_fn(nm, f64::abs, &mut c).unwrap();
            let materialized = nonneg.materialize();
            (ml::gnmf(&nonneg, &cfg).unwrap(), ml::gnmf(&materialized, &cfg).unwrap())
        }
        other => panic!("unknown algorithm {other}"),
    }
}
