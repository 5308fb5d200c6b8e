use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_finite, Algorithm, DataMatrix, Model, ModelOutput, TrainConfig, GNMF_EPSILON};
use crate::kernel::{self, ops::dense_matmul, DenseMatrix, NumericMatrix, OpCounter};
use crate::Result;

fn random_positive(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    // 1 - U[0, 1) lies in (0, 1]
    let data = (0..rows * cols).map(|_| 1.0 - rng.random::<f64>()).collect();
    DenseMatrix::from_vec(rows, cols, data).expect("length matches shape")
}

/// `m ← m ⊙ num / (den + ε)`
fn multiplicative_update(m: &mut DenseMatrix, num: &DenseMatrix, den: &DenseMatrix, counter: &mut OpCounter) {
    for ((v, &a), &b) in m.data_mut().iter_mut().zip(num.data()).zip(den.data()) {
        *v *= a / (b + GNMF_EPSILON);
    }
    counter.mul(2 * num.data().len());
    counter.add(num.data().len());
}

fn gram(m: &DenseMatrix, counter: &mut OpCounter) -> DenseMatrix {
    kernel::crossprod(&NumericMatrix::Dense(m.clone()), counter)
}

fn frobenius_inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Gaussian non-negative matrix factorization `T ≈ W Hᵀ` by multiplicative
/// updates.
///
/// `W` (`n × r`) and then `H` (`d × r`) are drawn uniformly from `(0, 1]`
/// with `cfg.seed`. Each iteration performs
/// `H ← H ⊙ TᵀW / (H·WᵀW + ε)` followed by `W ← W ⊙ TH / (W·HᵀH + ε)`.
/// The objective is `‖T − W Hᵀ‖²_F` after the iteration, expanded as
/// `‖T‖² − 2⟨W, TH⟩ + ⟨WᵀW, HᵀH⟩` so it reuses `TH` from the `W` update.
/// Negative entries in `T` are reported with a warning but not rejected.
pub fn gnmf<M: DataMatrix>(t: &M, cfg: &TrainConfig) -> Result<ModelOutput> {
    cfg.validate()?;
    if !t.is_nonnegative() {
        log::warn!("GNMF input has negative entries; multiplicative updates assume non-negative data");
    }
    let mut counter = OpCounter::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut w = random_positive(t.nrows(), cfg.rank, &mut rng);
    let mut h = random_positive(t.ncols(), cfg.rank, &mut rng);
    let t_norm = t.scalar_fn(|v| v * v, &mut counter)?.sum_all(&mut counter);

    let mut objective = Vec::with_capacity(cfg.iterations);
    let mut states = Vec::new();
    for iteration in 1..=cfg.iterations {
        let tw = t.tlmm(&w.clone().into(), &mut counter)?;
        let h_den = dense_matmul(&h, &gram(&w, &mut counter), &mut counter);
        multiplicative_update(&mut h, &tw, &h_den, &mut counter);

        let th = t.lmm(&h.clone().into(), &mut counter)?;
        let hh = gram(&h, &mut counter);
        let w_den = dense_matmul(&w, &hh, &mut counter);
        multiplicative_update(&mut w, &th, &w_den, &mut counter);

        let ww = gram(&w, &mut counter);
        objective.push(t_norm - 2.0 * frobenius_inner(&w, &th) + frobenius_inner(&ww, &hh));
        check_finite(&w, iteration)?;
        check_finite(&h, iteration)?;
        if cfg.record_states {
            states.push(Model::Factors { w: w.clone(), h: h.clone() });
        }
    }
    Ok(ModelOutput { algorithm: Algorithm::Gnmf, model: Model::Factors { w, h }, objective, states, counter })
}
