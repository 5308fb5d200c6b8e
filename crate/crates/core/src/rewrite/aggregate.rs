use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{DenseMatrix, NumericMatrix, OpCounter};
use crate::normmat::NormalizedMatrix;

/// `Σ_j I_j · rowSums(B_j)` over the untransposed blocks.
pub(crate) fn row_sums_base(nm: &NormalizedMatrix, counter: &mut OpCounter) -> Vec<f64> {
    let n = nm.base_rows();
    let mut out = vec![0.0; n];
    for (j, b) in nm.blocks().iter().enumerate() {
        if b.width() == 0 {
            continue;
        }
        let rs = b.table().row_sums(counter);
        if j > 0 {
            counter.add(n);
        }
        match b.indicator() {
            None => {
                for (o, v) in out.iter_mut().zip(&rs) {
                    *o += v;
                }
            }
            Some(k) => {
                for (o, &t) in out.iter_mut().zip(k.target()) {
                    *o += rs[t];
                }
            }
        }
    }
    out
}

/// `[colSums(I_j) · B_j]_j` over the untransposed blocks.
pub(crate) fn col_sums_base(nm: &NormalizedMatrix, counter: &mut OpCounter) -> Vec<f64> {
    let mut out = Vec::with_capacity(nm.base_cols());
    for b in nm.blocks() {
        match b.indicator() {
            None => out.extend(b.table().col_sums(counter)),
            Some(k) => {
                let counts = k.col_counts(counter);
                out.extend(weighted_col_sums(b.table(), &counts, counter));
            }
        }
    }
    out
}

/// `Σ_j colSums(I_j) · rowSums(B_j)`.
pub(crate) fn sum_base(nm: &NormalizedMatrix, counter: &mut OpCounter) -> f64 {
    let mut total = 0.0;
    for (j, b) in nm.blocks().iter().enumerate() {
        if j > 0 {
            counter.add(1);
        }
        total += match b.indicator() {
            None => b.table().sum(counter),
            Some(k) => {
                let counts = k.col_counts(counter);
                let rs = b.table().row_sums(counter);
                counter.fma(rs.len());
                counts.iter().zip(&rs).map(|(&c, v)| c as f64 * v).sum::<f64>()
            }
        };
    }
    total
}

/// `wᵀ · m` for integer weights `w`.
fn weighted_col_sums(m: &NumericMatrix, weights: &[usize], counter: &mut OpCounter) -> Vec<f64> {
    counter.fma(m.stored());
    let mut out = vec![0.0; m.cols()];
    match m {
        NumericMatrix::Dense(d) => {
            for (row, &w) in d.iter_rows().zip(weights) {
                let w = w as f64;
                for (o, v) in out.iter_mut().zip(row) {
                    *o += w * v;
                }
            }
        }
        NumericMatrix::Sparse(s) => {
            for (r, &w) in weights.iter().enumerate() {
                let (idx, val) = s.row(r);
                for (&c, &v) in idx.iter().zip(val) {
                    out[c] += w as f64 * v;
                }
            }
        }
    }
    out
}

/// Row sums of the logical matrix as a column vector.
pub fn row_sums(nm: &NormalizedMatrix, counter: &mut OpCounter) -> NumericMatrix {
    let v = if nm.is_transposed() { col_sums_base(nm, counter) } else { row_sums_base(nm, counter) };
    DenseMatrix::column(v).into()
}

/// Column sums of the logical matrix as a row vector.
pub fn col_sums(nm: &NormalizedMatrix, counter: &mut OpCounter) -> NumericMatrix {
    let v = if nm.is_transposed() { row_sums_base(nm, counter) } else { col_sums_base(nm, counter) };
    DenseMatrix::row_vector(v).into()
}

/// Sum of all entries (transpose-invariant).
pub fn sum_all(nm: &NormalizedMatrix, counter: &mut OpCounter) -> f64 {
    sum_base(nm, counter)
}
