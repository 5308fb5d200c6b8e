use alloc::format;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, DataMatrix, Model, ModelOutput, TrainConfig};
use crate::kernel::{self, DenseMatrix, OpCounter, ScalarOp};
use crate::{Error, Result};

/// Index of the single 1 in each row of an assignment mask.
fn assignment_of(mask: &DenseMatrix) -> Vec<usize> {
    mask.iter_rows().map(|row| row.iter().position(|&v| v == 1.0).unwrap_or(0)).collect()
}

/// Lloyd's K-Means in matrix form.
///
/// Centroids are the columns of `C` (`d × k`), initialized to `k` distinct
/// rows of `T` sampled with `cfg.seed`. Each iteration computes the squared
/// distances `D = rowSums(T²)·1 + 1·colSums(C²) − (2T)·C`, assigns every row
/// to its nearest centroid (ties to the lowest index), and recomputes
/// `C = TᵀA / colSums(A)`. A cluster that loses all its points keeps its
/// previous centroid. The objective of an iteration is the summed squared
/// distance of the points to the centroids entering it.
pub fn kmeans<M: DataMatrix>(t: &M, cfg: &TrainConfig) -> Result<ModelOutput> {
    cfg.validate()?;
    let (n, k) = (t.nrows(), cfg.k);
    if k > n {
        return Err(Error::InvalidConfig(format!("k = {k} exceeds the number of rows ({n})")));
    }
    let mut counter = OpCounter::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds = rand::seq::index::sample(&mut rng, n, k).into_vec();
    let mut c = t.rows_as_columns(&seeds, &mut counter)?;

    let dist_t = t.scalar_fn(|v| v * v, &mut counter)?.row_sums(&mut counter);
    let t2 = t.scalar_op(2.0, ScalarOp::Mul, &mut counter)?;

    let mut objective = Vec::with_capacity(cfg.iterations);
    let mut states = Vec::new();
    let mut assignment = Vec::new();
    for _ in 0..cfg.iterations {
        let c_norms = c.col_sums_of_squares(&mut counter);
        let mut dist = t2.lmm(&c.clone().into(), &mut counter)?;
        for (row, &dt) in dist.data_mut().chunks_exact_mut(k).zip(&dist_t) {
            for (v, &cn) in row.iter_mut().zip(&c_norms) {
                *v = dt + cn - *v;
            }
        }
        counter.add(2 * n * k);
        let mask = kernel::row_min_mask(&dist)?;
        assignment = assignment_of(&mask);
        objective.push(assignment.iter().enumerate().map(|(i, &j)| dist.get(i, j)).sum());

        let mut sizes = alloc::vec![0usize; k];
        for &j in &assignment {
            sizes[j] += 1;
        }
        let sums = t.tlmm(&mask.into(), &mut counter)?;
        for (c_row, s_row) in c.data_mut().chunks_exact_mut(k).zip(sums.iter_rows()) {
            for ((cv, &sv), &size) in c_row.iter_mut().zip(s_row).zip(&sizes) {
                if size > 0 {
                    *cv = sv / size as f64;
                }
            }
        }
        counter.mul(c.rows() * k);
        if cfg.record_states {
            states.push(Model::Clusters { centroids: c.clone(), assignment: assignment.clone() });
        }
    }
    Ok(ModelOutput {
        algorithm: Algorithm::KMeans,
        model: Model::Clusters { centroids: c, assignment },
        objective,
        states,
        counter,
    })
}

impl DenseMatrix {
    pub(crate) fn col_sums_of_squares(&self, counter: &mut OpCounter) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.cols()];
        for row in self.iter_rows() {
            for (o, &v) in out.iter_mut().zip(row) {
                *o += v * v;
            }
        }
        counter.fma(self.rows() * self.cols());
        out
    }
}
