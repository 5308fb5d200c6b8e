//! Instrumented matrix products.
//!
//! Every product counts one multiply and one addition per scalar product it
//! actually performs: `m*k*n` for dense operands, `nnz`-proportional for
//! sparse ones. Symmetric products (`crossprod`, `tcrossprod`) compute one
//! triangle and mirror it, so their outputs are exactly symmetric.

use alloc::vec;
use alloc::vec::Vec;

use super::{CsrMatrix, DenseMatrix, NumericMatrix, OpCounter};
use crate::{Error, Result};

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = [0.0f64; 4];
    let xc = x.chunks_exact(4);
    let yc = y.chunks_exact(4);
    let tail: f64 = xc.remainder().iter().zip(yc.remainder()).map(|(a, b)| a * b).sum();
    for (a, b) in xc.zip(yc) {
        acc[0] += a[0] * b[0];
        acc[1] += a[1] * b[1];
        acc[2] += a[2] * b[2];
        acc[3] += a[3] * b[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Runs `f(row_index, row)` over every row of `out`. Rows are independent,
/// so the parallel build produces bitwise-identical results.
pub(crate) fn fill_rows<F>(out: &mut DenseMatrix, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    let cols = out.cols();
    if cols == 0 {
        return;
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.data_mut().par_chunks_mut(cols).with_min_len(512).enumerate().for_each(|(r, row)| f(r, row));
    }
    #[cfg(not(feature = "parallel"))]
    for (r, row) in out.data_mut().chunks_mut(cols).enumerate() {
        f(r, row);
    }
}

fn mirror_upper(out: &mut DenseMatrix) {
    let n = out.rows();
    for i in 0..n {
        for j in 0..i {
            let v = out.get(j, i);
            out.set(i, j, v);
        }
    }
}

/// `a * b`. Sparse times sparse stays sparse; every other combination
/// produces a dense result.
pub fn matmul(a: &NumericMatrix, b: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::shape("matmul", a.shape(), b.shape()));
    }
    Ok(match (a, b) {
        (NumericMatrix::Dense(a), NumericMatrix::Dense(b)) => dense_matmul(a, b, counter).into(),
        (NumericMatrix::Sparse(a), NumericMatrix::Dense(b)) => sparse_dense_matmul(a, b, counter).into(),
        (NumericMatrix::Dense(a), NumericMatrix::Sparse(b)) => dense_sparse_matmul(a, b, counter).into(),
        (NumericMatrix::Sparse(a), NumericMatrix::Sparse(b)) => sparse_sparse_matmul(a, b, counter).into(),
    })
}

pub(crate) fn dense_matmul(a: &DenseMatrix, b: &DenseMatrix, counter: &mut OpCounter) -> DenseMatrix {
    debug_assert_eq!(a.cols(), b.rows());
    counter.fma(a.rows() * a.cols() * b.cols());
    let mut out = DenseMatrix::zeros(a.rows(), b.cols());
    if b.cols() == 1 {
        let x = b.data();
        fill_rows(&mut out, |r, o| o[0] = dot(a.row(r), x));
    } else {
        fill_rows(&mut out, |r, o| {
            for (p, &av) in a.row(r).iter().enumerate() {
                axpy(o, av, b.row(p));
            }
        });
    }
    out
}

pub(crate) fn sparse_dense_matmul(a: &CsrMatrix, b: &DenseMatrix, counter: &mut OpCounter) -> DenseMatrix {
    counter.fma(a.nnz() * b.cols());
    let mut out = DenseMatrix::zeros(a.rows(), b.cols());
    fill_rows(&mut out, |r, o| {
        let (idx, val) = a.row(r);
        for (&p, &av) in idx.iter().zip(val) {
            axpy(o, av, b.row(p));
        }
    });
    out
}

fn dense_sparse_matmul(a: &DenseMatrix, b: &CsrMatrix, counter: &mut OpCounter) -> DenseMatrix {
    counter.fma(a.rows() * b.nnz());
    let mut out = DenseMatrix::zeros(a.rows(), b.cols());
    fill_rows(&mut out, |r, o| {
        for (p, &av) in a.row(r).iter().enumerate() {
            let (idx, val) = b.row(p);
            for (&c, &bv) in idx.iter().zip(val) {
                o[c] += av * bv;
            }
        }
    });
    out
}

fn sparse_sparse_matmul(a: &CsrMatrix, b: &CsrMatrix, counter: &mut OpCounter) -> CsrMatrix {
    let n = b.cols();
    let mut acc = vec![0.0; n];
    let mut marker = vec![usize::MAX; n];
    let mut offsets = Vec::with_capacity(a.rows() + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut products = 0usize;
    offsets.push(0);
    let mut touched: Vec<usize> = Vec::new();
    for r in 0..a.rows() {
        touched.clear();
        let (aidx, aval) = a.row(r);
        for (&p, &av) in aidx.iter().zip(aval) {
            let (bidx, bval) = b.row(p);
            products += bidx.len();
            for (&c, &bv) in bidx.iter().zip(bval) {
                if marker[c] != r {
                    marker[c] = r;
                    acc[c] = 0.0;
                    touched.push(c);
                }
                acc[c] += av * bv;
            }
        }
        touched.sort_unstable();
        for &c in &touched {
            if acc[c] != 0.0 {
                indices.push(c);
                values.push(acc[c]);
            }
        }
        offsets.push(indices.len());
    }
    counter.fma(products);
    CsrMatrix::from_parts_unchecked(a.rows(), n, offsets, indices, values)
}

/// `aᵀ * b` without forming the transpose.
pub fn tmatmul(a: &NumericMatrix, b: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::shape("tmatmul", (a.cols(), a.rows()), b.shape()));
    }
    let p = a.cols();
    let q = b.cols();
    let mut out = DenseMatrix::zeros(p, q);
    match (a, b) {
        (NumericMatrix::Dense(a), NumericMatrix::Dense(b)) => {
            counter.fma(a.rows() * p * q);
            if q == 1 {
                let o = out.data_mut();
                for r in 0..a.rows() {
                    axpy(o, b.get(r, 0), a.row(r));
                }
            } else {
                for r in 0..a.rows() {
                    let br = b.row(r);
                    for (i, &av) in a.row(r).iter().enumerate() {
                        axpy(out.row_mut(i), av, br);
                    }
                }
            }
        }
        (NumericMatrix::Sparse(a), NumericMatrix::Dense(b)) => {
            counter.fma(a.nnz() * q);
            for r in 0..a.rows() {
                let br = b.row(r);
                let (idx, val) = a.row(r);
                for (&i, &av) in idx.iter().zip(val) {
                    axpy(out.row_mut(i), av, br);
                }
            }
        }
        (NumericMatrix::Dense(a), NumericMatrix::Sparse(b)) => {
            counter.fma(p * b.nnz());
            for r in 0..a.rows() {
                let (idx, val) = b.row(r);
                for (i, &av) in a.row(r).iter().enumerate() {
                    let o = out.row_mut(i);
                    for (&c, &bv) in idx.iter().zip(val) {
                        o[c] += av * bv;
                    }
                }
            }
        }
        (NumericMatrix::Sparse(a), NumericMatrix::Sparse(b)) => {
            for r in 0..a.rows() {
                let (aidx, aval) = a.row(r);
                let (bidx, bval) = b.row(r);
                counter.fma(aidx.len() * bidx.len());
                for (&i, &av) in aidx.iter().zip(aval) {
                    let o = out.row_mut(i);
                    for (&c, &bv) in bidx.iter().zip(bval) {
                        o[c] += av * bv;
                    }
                }
            }
        }
    }
    Ok(out.into())
}

/// `a * bᵀ` without forming the transpose.
pub fn matmul_t(a: &NumericMatrix, b: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::shape("matmul_t", a.shape(), (b.cols(), b.rows())));
    }
    let mut out = DenseMatrix::zeros(a.rows(), b.rows());
    match (a, b) {
        (NumericMatrix::Dense(a), NumericMatrix::Dense(b)) => {
            counter.fma(a.rows() * b.rows() * a.cols());
            fill_rows(&mut out, |i, o| {
                let ar = a.row(i);
                for (j, v) in o.iter_mut().enumerate() {
                    *v = dot(ar, b.row(j));
                }
            });
        }
        (NumericMatrix::Sparse(a), NumericMatrix::Dense(b)) => {
            counter.fma(a.nnz() * b.rows());
            fill_rows(&mut out, |i, o| {
                let (idx, val) = a.row(i);
                for (j, v) in o.iter_mut().enumerate() {
                    let br = b.row(j);
                    *v = idx.iter().zip(val).map(|(&c, &av)| av * br[c]).sum();
                }
            });
        }
        (NumericMatrix::Dense(_), NumericMatrix::Sparse(_)) => {
            let t = matmul_t(b, a, counter)?;
            return Ok(t.transpose());
        }
        (NumericMatrix::Sparse(a), NumericMatrix::Sparse(b)) => {
            let mut products = 0usize;
            for i in 0..a.rows() {
                let ar = a.row(i);
                for j in 0..b.rows() {
                    let (v, n) = sparse_dot(ar, b.row(j));
                    products += n;
                    out.set(i, j, v);
                }
            }
            counter.fma(products);
        }
    }
    Ok(out.into())
}

fn sparse_dot(a: (&[usize], &[f64]), b: (&[usize], &[f64])) -> (f64, usize) {
    let (ai, av) = a;
    let (bi, bv) = b;
    let (mut p, mut q) = (0, 0);
    let mut acc = 0.0;
    let mut n = 0;
    while p < ai.len() && q < bi.len() {
        match ai[p].cmp(&bi[q]) {
            core::cmp::Ordering::Less => p += 1,
            core::cmp::Ordering::Greater => q += 1,
            core::cmp::Ordering::Equal => {
                acc += av[p] * bv[q];
                n += 1;
                p += 1;
                q += 1;
            }
        }
    }
    (acc, n)
}

/// `aᵀ * a`, upper triangle computed and mirrored.
pub fn crossprod(a: &NumericMatrix, counter: &mut OpCounter) -> DenseMatrix {
    let d = a.cols();
    let mut out = DenseMatrix::zeros(d, d);
    match a {
        NumericMatrix::Dense(a) => {
            counter.fma(a.rows() * d * (d + 1) / 2);
            for row in a.iter_rows() {
                for (i, &v) in row.iter().enumerate() {
                    let o = &mut out.row_mut(i)[i..];
                    axpy(o, v, &row[i..]);
                }
            }
        }
        NumericMatrix::Sparse(a) => {
            for r in 0..a.rows() {
                let (idx, val) = a.row(r);
                let k = idx.len();
                counter.fma(k * (k + 1) / 2);
                for p in 0..k {
                    let (i, vi) = (idx[p], val[p]);
                    let o = out.row_mut(i);
                    for q in p..k {
                        o[idx[q]] += vi * val[q];
                    }
                }
            }
        }
    }
    mirror_upper(&mut out);
    out
}

/// `a * aᵀ`, upper triangle computed and mirrored.
pub fn tcrossprod(a: &NumericMatrix, counter: &mut OpCounter) -> DenseMatrix {
    let n = a.rows();
    let mut out = DenseMatrix::zeros(n, n);
    match a {
        NumericMatrix::Dense(a) => {
            counter.fma(n * (n + 1) / 2 * a.cols());
            for i in 0..n {
                let ai = a.row(i);
                for j in i..n {
                    out.set(i, j, dot(ai, a.row(j)));
                }
            }
        }
        NumericMatrix::Sparse(a) => {
            let mut products = 0;
            for i in 0..n {
                for j in i..n {
                    let (v, k) = sparse_dot(a.row(i), a.row(j));
                    products += k;
                    out.set(i, j, v);
                }
            }
            counter.fma(products);
        }
    }
    mirror_upper(&mut out);
    out
}

/// 0/1 mask marking the minimum of each row. Ties go to the lowest column.
pub fn row_min_mask(d: &DenseMatrix) -> Result<DenseMatrix> {
    if d.rows() == 0 || d.cols() == 0 {
        return Err(Error::InvalidMatrix("row_min_mask needs at least one row and one column".into()));
    }
    let mut out = DenseMatrix::zeros(d.rows(), d.cols());
    for (r, row) in d.iter_rows().enumerate() {
        let mut best = 0;
        for (c, &v) in row.iter().enumerate() {
            if v.is_nan() {
                return Err(Error::NanInRow { row: r });
            }
            if v < row[best] {
                best = c;
            }
        }
        out.set(r, best, 1.0);
    }
    Ok(out)
}
