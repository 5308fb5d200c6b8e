//! Singular value decomposition (one-sided Jacobi) and pseudo-inverses.
//!
//! The rewrite rules only ever invert small Gram matrices (d×d or n×n), so a
//! compact, accurate Jacobi SVD is preferable to an external LAPACK binding.

use alloc::vec::Vec;

use num_traits::Float;

use super::{DenseMatrix, NumericMatrix};
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Relative safety factor applied to the rank cutoff of [`pinv_gram`].
///
/// Rounding noise in a computed Gram matrix `TᵀT` is of order
/// `rows(T) · eps · ‖TᵀT‖`, so the cutoff scales with the row count of the
/// matrix the Gram was formed from rather than the Gram's own dimension.
pub const GRAM_CUTOFF_FACTOR: f64 = 16.0;

/// Thin SVD `a = u · diag(s) · vᵀ` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k` with orthonormal columns (columns for zero singular values are zero).
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    /// `cols × k` with orthonormal columns.
    pub v: DenseMatrix,
}

/// Computes the thin SVD of `a` (`k = min(rows, cols)`).
pub fn svd(a: &DenseMatrix) -> Result<Svd> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd { u: t.v, singular_values: t.singular_values, v: t.u });
    }
    let (m, n) = a.shape();
    // work on columns as contiguous rows
    let mut cols = a.transpose();
    let mut v = DenseMatrix::identity(n);
    let eps = f64::EPSILON;
    // columns below this squared norm are numerically zero; rotating them
    // only reshuffles rounding noise and can keep the sweep from settling
    let negligible = eps * eps * a.data().iter().map(|x| x * x).sum::<f64>();

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (alpha, beta, gamma) = {
                    let cp = cols.row(p);
                    let cq = cols.row(q);
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        a += x * x;
                        b += y * y;
                        g += x * y;
                    }
                    (a, b, g)
                };
                if gamma == 0.0 || alpha.min(beta) <= negligible || Float::abs(gamma) <= eps * Float::sqrt(alpha * beta)
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = Float::signum(zeta) / (Float::abs(zeta) + Float::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / Float::sqrt(1.0 + t * t);
                let s = c * t;
                rotate_rows(&mut cols, p, q, c, s);
                rotate_rows(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    // v currently holds Vᵀ as rows
    let mut order: Vec<(usize, f64)> =
        (0..n).map(|j| (j, Float::sqrt(cols.row(j).iter().map(|x| x * x).sum::<f64>()))).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));

    let mut u = DenseMatrix::zeros(m, n);
    let mut vout = DenseMatrix::zeros(n, n);
    let mut singular_values = Vec::with_capacity(n);
    for (k, &(j, sigma)) in order.iter().enumerate() {
        singular_values.push(sigma);
        if sigma > 0.0 {
            for (i, &x) in cols.row(j).iter().enumerate() {
                u.set(i, k, x / sigma);
            }
        }
        for (i, &x) in v.row(j).iter().enumerate() {
            vout.set(i, k, x);
        }
    }
    Ok(Svd { u, singular_values, v: vout })
}

fn rotate_rows(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let cols = m.cols();
    let data = m.data_mut();
    let (head, tail) = data.split_at_mut(q * cols);
    let rp = &mut head[p * cols..(p + 1) * cols];
    let rq = &mut tail[..cols];
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

/// Default rank cutoff: `eps · max(rows, cols) · σ_max`.
pub fn default_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    f64::EPSILON * rows.max(cols) as f64 * sigma_max
}

/// Singular values in descending order.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.singular_values)
}

/// Number of singular values above the default cutoff.
pub fn numeric_rank(a: &DenseMatrix) -> Result<usize> {
    let s = singular_values(a)?;
    let smax = s.first().copied().unwrap_or(0.0);
    let tol = default_tolerance(a.rows(), a.cols(), smax);
    Ok(s.iter().filter(|&&x| x > tol).count())
}

/// Moore–Penrose pseudo-inverse with the default rank cutoff.
pub fn pinv_dense(a: &NumericMatrix) -> Result<NumericMatrix> {
    let a = a.to_dense();
    let s = svd(&a)?;
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    let tol = default_tolerance(a.rows(), a.cols(), smax);
    Ok(assemble_pinv(&s, tol).into())
}

/// Moore–Penrose pseudo-inverse discarding singular values `<= tol`.
pub fn pinv_with_tolerance(a: &DenseMatrix, tol: f64) -> Result<DenseMatrix> {
    let s = svd(a)?;
    Ok(assemble_pinv(&s, tol))
}

/// Pseudo-inverse of a Gram matrix built from a matrix with `source_rows`
/// rows. The cutoff is `GRAM_CUTOFF_FACTOR · eps · max(source_rows, dim) · σ_max`.
pub fn pinv_gram(g: &DenseMatrix, source_rows: usize) -> Result<DenseMatrix> {
    let s = svd(g)?;
    let smax = s.singular_values.first().copied().unwrap_or(0.0);
    let tol = GRAM_CUTOFF_FACTOR * default_tolerance(source_rows, g.rows(), smax);
    Ok(assemble_pinv(&s, tol))
}

fn assemble_pinv(s: &Svd, tol: f64) -> DenseMatrix {
    let m = s.u.rows();
    let n = s.v.rows();
    let mut out = DenseMatrix::zeros(n, m);
    for (k, &sigma) in s.singular_values.iter().enumerate() {
        if sigma <= tol || sigma == 0.0 {
            continue;
        }
        let inv = 1.0 / sigma;
        for i in 0..n {
            let vik = s.v.get(i, k) * inv;
            if vik == 0.0 {
                continue;
            }
            let row = out.row_mut(i);
            for (j, o) in row.iter_mut().enumerate() {
                *o += vik * s.u.get(j, k);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ops::matmul;
    use crate::kernel::OpCounter;

    fn mm(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let mut c = OpCounter::new();
        matmul(&a.clone().into(), &b.clone().into(), &mut c).unwrap().into_dense()
    }

    fn max_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
        a.data().iter().zip(b.data()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    fn assert_penrose(a: &DenseMatrix, p: &DenseMatrix) {
        let smax = singular_values(a).unwrap()[0].max(1.0);
        let tol = 1e-8 * smax;
        let apa = mm(&mm(a, p), a);
        let pap = mm(&mm(p, a), p);
        let ap = mm(a, p);
        let pa = mm(p, a);
        assert!(max_diff(&apa, a) < tol);
        assert!(max_diff(&pap, p) < tol);
        assert!(max_diff(&ap, &ap.transpose()) < tol);
        assert!(max_diff(&pa, &pa.transpose()) < tol);
    }

    #[test]
    fn pinv_of_diagonal() {
        let a = DenseMatrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let p = pinv_dense(&a.clone().into()).unwrap().into_dense();
        let expected = DenseMatrix::from_rows(&[[0.5, 0.0], [0.0, 0.25]]).unwrap();
        assert!(max_diff(&p, &expected) < 1e-15);
    }

    #[test]
    fn pinv_of_zero_is_zero() {
        let a = DenseMatrix::zeros(2, 2);
        let p = pinv_dense(&a.into()).unwrap().into_dense();
        assert_eq!(p, DenseMatrix::zeros(2, 2));
    }

    #[test]
    fn pinv_of_wide_selection() {
        let a = DenseMatrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let p = pinv_dense(&a.clone().into()).unwrap().into_dense();
        let expected = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(max_diff(&p, &expected) < 1e-15);
        assert_penrose(&a, &p);
    }

    #[test]
    fn pinv_of_rank_deficient_matrix() {
        // fourth column is twice the third
        let a =
            DenseMatrix::from_rows(&[[1.0, 2.0, 10.0, 20.0], [3.0, 4.0, 30.0, 40.0], [5.0, 6.0, 10.0, 20.0]]).unwrap();
        assert_eq!(numeric_rank(&a).unwrap(), 3);
        let p = pinv_dense(&a.clone().into()).unwrap().into_dense();
        assert_penrose(&a, &p);
    }

    #[test]
    fn svd_reconstructs() {
        let a =
            DenseMatrix::from_rows(&[[4.0, 1.0, -2.0], [0.5, 3.0, 1.0], [2.0, -1.0, 0.0], [1.0, 1.0, 1.0]]).unwrap();
        let s = svd(&a).unwrap();
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let mut us = s.u.clone();
        for r in 0..us.rows() {
            for (k, v) in us.row_mut(r).iter_mut().enumerate() {
                *v *= s.singular_values[k];
            }
        }
        let back = mm(&us, &s.v.transpose());
        assert!(max_diff(&back, &a) < 1e-12);
    }
}
