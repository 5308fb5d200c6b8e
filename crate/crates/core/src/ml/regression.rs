use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::{check_finite, Algorithm, DataMatrix, Model, ModelOutput, TrainConfig};
use crate::kernel::{self, DenseMatrix, NumericMatrix, OpCounter};
use crate::{Error, Result};

fn check_target<M: DataMatrix>(t: &M, y: &NumericMatrix, op: &'static str) -> Result<()> {
    if y.shape() != (t.nrows(), 1) {
        return Err(Error::shape(op, (t.nrows(), t.ncols()), y.shape()));
    }
    Ok(())
}

/// `log(1 + exp(x))` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + Float::ln_1p(Float::exp(-x.abs()))
}

/// Running logistic loss `Σ log(1 + exp(−y z))`.
///
/// For `±1` labels the loss of a row is `−ln q` with `q = σ(y z)`, the
/// probability of the observed label, which follows from the `exp(z)` the
/// gradient already needs. The `q` values are multiplied into a mantissa
/// whose binary exponent is moved into an integer after every row, so one
/// logarithm serves the whole pass. Rows with tiny `q` or other labels use
/// `softplus` directly.
///
/// The per-row work is free of data-dependent branches: labels are random,
/// and a mispredicted branch per row costs as much as the `exp` itself.
#[derive(Debug, Default)]
struct LogisticLoss {
    /// Mantissa in `[1, 2)`.
    mantissa: f64,
    /// The product of the `q` values is `mantissa · 2^exponent`.
    exponent: i64,
    direct: f64,
}

impl LogisticLoss {
    const EXPONENT_MASK: u64 = 0x7ff;
    const EXPONENT_BIAS: i64 = 1023;
    const MANTISSA_MASK: u64 = (1 << 52) - 1;
    /// Smallest `q` taken through the product; `mantissa · q` stays normal.
    const MIN_PROBABILITY: f64 = 1e-180;

    fn new() -> Self {
        LogisticLoss { mantissa: 1.0, exponent: 0, direct: 0.0 }
    }

    /// Adds the row with score `z`, label `y`, `e = exp(z)` and
    /// `inv = 1 / (1 + e)`.
    #[inline]
    fn push(&mut self, z: f64, y: f64, e: f64, inv: f64) {
        // an infinite `e` gives NaN or zero here and takes the direct path
        let q = if y == 1.0 { e } else { 1.0 } * inv;
        if (q >= Self::MIN_PROBABILITY) & (y.abs() == 1.0) {
            let bits = (self.mantissa * q).to_bits();
            self.exponent += ((bits >> 52) & Self::EXPONENT_MASK) as i64 - Self::EXPONENT_BIAS;
            self.mantissa = f64::from_bits((bits & Self::MANTISSA_MASK) | ((Self::EXPONENT_BIAS as u64) << 52));
        } else {
            self.direct += softplus(-y * z);
        }
    }

    fn total(&self) -> f64 {
        self.direct - (self.exponent as f64) * core::f64::consts::LN_2 - Float::ln(self.mantissa)
    }
}

/// Logistic regression by batch gradient descent.
///
/// Starting from `w = 0`, each iteration applies
/// `w ← w + α · Tᵀ (y / (1 + exp(T w)))` with labels `y ∈ {−1, +1}`.
/// The objective recorded for an iteration is the logistic loss
/// `Σ log(1 + exp(−y ⊙ T w))` of the weights entering it.
pub fn logistic_gd<M: DataMatrix>(t: &M, y: &NumericMatrix, cfg: &TrainConfig) -> Result<ModelOutput> {
    cfg.validate()?;
    check_target(t, y, "logistic regression")?;
    let y = y.to_dense();
    let mut counter = OpCounter::new();
    let mut w = DenseMatrix::zeros(t.ncols(), 1);
    let mut objective = Vec::with_capacity(cfg.iterations);
    let mut states = Vec::new();
    for iteration in 1..=cfg.iterations {
        let z = t.lmm(&w.clone().into(), &mut counter)?;
        let mut loss = LogisticLoss::new();
        let p: Vec<f64> = z
            .data()
            .iter()
            .zip(y.data())
            .map(|(&z, &y)| {
                let e = Float::exp(z);
                let inv = 1.0 / (1.0 + e);
                loss.push(z, y, e, inv);
                y * inv
            })
            .collect();
        counter.add(z.rows());
        objective.push(loss.total());
        let g = t.tlmm(&DenseMatrix::column(p).into(), &mut counter)?;
        kernel::ops::axpy(w.data_mut(), cfg.step_size, g.data());
        counter.fma(g.rows());
        check_finite(&w, iteration)?;
        if cfg.record_states {
            states.push(Model::Weights(w.clone()));
        }
    }
    Ok(ModelOutput { algorithm: Algorithm::LogisticRegression, model: Model::Weights(w), objective, states, counter })
}

/// Squared residual `‖T w − y‖²`, reusing an already computed `T w`.
fn residual(tw: &DenseMatrix, y: &DenseMatrix) -> (Vec<f64>, f64) {
    let r: Vec<f64> = tw.data().iter().zip(y.data()).map(|(a, b)| a - b).collect();
    let norm = r.iter().map(|v| v * v).sum();
    (r, norm)
}

/// Minimum-norm least squares through the normal equations:
/// `w = pinv(TᵀT) · Tᵀ y`.
///
/// The objective holds the single value `‖T w − y‖²`.
pub fn linreg_normal<M: DataMatrix>(t: &M, y: &NumericMatrix) -> Result<ModelOutput> {
    check_target(t, y, "linear regression")?;
    let mut counter = OpCounter::new();
    let p = kernel::pinv_gram(&t.crossprod(&mut counter)?, t.nrows())?;
    let ty = t.tlmm(y, &mut counter)?;
    let w = kernel::ops::dense_matmul(&p, &ty, &mut counter);
    let tw = t.lmm(&w.clone().into(), &mut counter)?;
    let (_, norm) = residual(&tw, &y.to_dense());
    Ok(ModelOutput {
        algorithm: Algorithm::LinearRegressionNormal,
        model: Model::Weights(w),
        objective: vec![norm],
        states: Vec::new(),
        counter,
    })
}

/// Linear regression by gradient descent from `w = 0`; see [`linreg_gd_from`].
pub fn linreg_gd<M: DataMatrix>(t: &M, y: &NumericMatrix, cfg: &TrainConfig) -> Result<ModelOutput> {
    linreg_gd_from(t, y, cfg, DenseMatrix::zeros(t.ncols(), 1))
}

/// Linear regression by gradient descent: `w ← w − α · Tᵀ (T w − y)`.
///
/// The objective recorded for an iteration is `‖T w − y‖²` of the weights
/// entering it.
pub fn linreg_gd_from<M: DataMatrix>(
    t: &M,
    y: &NumericMatrix,
    cfg: &TrainConfig,
    w0: DenseMatrix,
) -> Result<ModelOutput> {
    cfg.validate()?;
    check_target(t, y, "linear regression")?;
    if w0.shape() != (t.ncols(), 1) {
        return Err(Error::shape("initial weights", (t.ncols(), 1), w0.shape()));
    }
    let y = y.to_dense();
    let mut counter = OpCounter::new();
    let mut w = w0;
    let mut objective = Vec::with_capacity(cfg.iterations);
    let mut states = Vec::new();
    for iteration in 1..=cfg.iterations {
        let tw = t.lmm(&w.clone().into(), &mut counter)?;
        let (r, norm) = residual(&tw, &y);
        counter.add(r.len());
        objective.push(norm);
        let g = t.tlmm(&DenseMatrix::column(r).into(), &mut counter)?;
        kernel::ops::axpy(w.data_mut(), -cfg.step_size, g.data());
        counter.fma(g.rows());
        check_finite(&w, iteration)?;
        if cfg.record_states {
            states.push(Model::Weights(w.clone()));
        }
    }
    Ok(ModelOutput { algorithm: Algorithm::LinearRegressionGd, model: Model::Weights(w), objective, states, counter })
}
