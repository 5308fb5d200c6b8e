use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{CsrMatrix, DenseMatrix, OpCounter};
use crate::{Error, Result};

/// A regular numeric matrix, dense or compressed-sparse-row.
#[derive(Debug, Clone, PartialEq)]
pub enum NumericMatrix {
    Dense(DenseMatrix),
    Sparse(CsrMatrix),
}

impl From<DenseMatrix> for NumericMatrix {
    fn from(m: DenseMatrix) -> Self {
        NumericMatrix::Dense(m)
    }
}

impl From<CsrMatrix> for NumericMatrix {
    fn from(m: CsrMatrix) -> Self {
        NumericMatrix::Sparse(m)
    }
}

impl NumericMatrix {
    /// Dense matrix from rows; see [`DenseMatrix::from_rows`].
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        DenseMatrix::from_rows(rows).map(NumericMatrix::Dense)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        NumericMatrix::Dense(DenseMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        match self {
            NumericMatrix::Dense(m) => m.rows(),
            NumericMatrix::Sparse(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            NumericMatrix::Dense(m) => m.cols(),
            NumericMatrix::Sparse(m) => m.cols(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, NumericMatrix::Sparse(_))
    }

    /// Number of stored entries (all cells for dense storage).
    pub fn stored(&self) -> usize {
        match self {
            NumericMatrix::Dense(m) => m.rows() * m.cols(),
            NumericMatrix::Sparse(m) => m.nnz(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            NumericMatrix::Dense(m) => m.nnz(),
            NumericMatrix::Sparse(m) => m.nnz(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        match self {
            NumericMatrix::Dense(m) => m.get(r, c),
            NumericMatrix::Sparse(m) => m.get(r, c),
        }
    }

    pub fn as_dense(&self) -> Option<&DenseMatrix> {
        match self {
            NumericMatrix::Dense(m) => Some(m),
            NumericMatrix::Sparse(_) => None,
        }
    }

    pub fn as_sparse(&self) -> Option<&CsrMatrix> {
        match self {
            NumericMatrix::Sparse(m) => Some(m),
            NumericMatrix::Dense(_) => None,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            NumericMatrix::Dense(m) => m.clone(),
            NumericMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn into_dense(self) -> DenseMatrix {
        match self {
            NumericMatrix::Dense(m) => m,
            NumericMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        match self {
            NumericMatrix::Dense(m) => CsrMatrix::from_dense(m),
            NumericMatrix::Sparse(m) => m.clone(),
        }
    }

    /// Fraction of nonzero cells.
    pub fn density(&self) -> f64 {
        let cells = self.rows() * self.cols();
        if cells == 0 {
            0.0
        } else {
            self.nnz() as f64 / cells as f64
        }
    }

    /// Re-stores the matrix sparse when its density is at most `threshold`,
    /// dense otherwise.
    pub fn with_density_threshold(self, threshold: f64) -> NumericMatrix {
        let sparse = self.density() <= threshold;
        match (self, sparse) {
            (NumericMatrix::Dense(m), true) => NumericMatrix::Sparse(CsrMatrix::from_dense(&m)),
            (NumericMatrix::Sparse(m), false) => NumericMatrix::Dense(m.to_dense()),
            (m, _) => m,
        }
    }

    pub fn transpose(&self) -> NumericMatrix {
        match self {
            NumericMatrix::Dense(m) => m.transpose().into(),
            NumericMatrix::Sparse(m) => m.transpose().into(),
        }
    }

    /// Applies `f` to every element. Sparse storage is kept when `f(0) == 0`;
    /// otherwise the result is densified. Each application is counted as one
    /// multiply.
    pub fn map_elements(&self, f: impl Fn(f64) -> f64, counter: &mut OpCounter) -> NumericMatrix {
        counter.mul(self.stored());
        match self {
            NumericMatrix::Dense(m) => m.map(f).into(),
            NumericMatrix::Sparse(m) => {
                if f(0.0) == 0.0 {
                    let mut out = m.clone();
                    for v in out.values_mut() {
                        *v = f(*v);
                    }
                    out.into()
                } else {
                    log::warn!(
                        "elementwise function with f(0) != 0 densifies a {}x{} sparse matrix",
                        m.rows(),
                        m.cols()
                    );
                    let extra = m.rows() * m.cols() - m.nnz();
                    counter.mul(extra);
                    m.to_dense().map(f).into()
                }
            }
        }
    }

    pub fn row_sums(&self, counter: &mut OpCounter) -> Vec<f64> {
        counter.add(self.stored());
        match self {
            NumericMatrix::Dense(m) => m.iter_rows().map(|r| r.iter().sum()).collect(),
            NumericMatrix::Sparse(m) => (0..m.rows()).map(|r| m.row(r).1.iter().sum()).collect(),
        }
    }

    pub fn col_sums(&self, counter: &mut OpCounter) -> Vec<f64> {
        counter.add(self.stored());
        let mut out = vec![0.0; self.cols()];
        match self {
            NumericMatrix::Dense(m) => {
                for row in m.iter_rows() {
                    for (o, v) in out.iter_mut().zip(row) {
                        *o += v;
                    }
                }
            }
            NumericMatrix::Sparse(m) => {
                for (&c, &v) in m.indices().iter().zip(m.values()) {
                    out[c] += v;
                }
            }
        }
        out
    }

    pub fn sum(&self, counter: &mut OpCounter) -> f64 {
        counter.add(self.stored());
        match self {
            NumericMatrix::Dense(m) => m.sum(),
            NumericMatrix::Sparse(m) => m.values().iter().sum(),
        }
    }

    pub fn slice_rows(&self, range: Range<usize>) -> NumericMatrix {
        match self {
            NumericMatrix::Dense(m) => m.slice_rows(range).into(),
            NumericMatrix::Sparse(m) => m.slice_rows(range).into(),
        }
    }

    pub fn slice_cols(&self, range: Range<usize>) -> NumericMatrix {
        match self {
            NumericMatrix::Dense(m) => m.slice_cols(range).into(),
            NumericMatrix::Sparse(m) => m.slice_cols(range).into(),
        }
    }

    pub fn select_rows(&self, rows: &[usize]) -> NumericMatrix {
        match self {
            NumericMatrix::Dense(m) => m.select_rows(rows).into(),
            NumericMatrix::Sparse(m) => m.select_rows(rows).into(),
        }
    }

    /// Multiplies row `r` by `weights[r]`.
    pub fn scale_rows(&self, weights: &[f64], counter: &mut OpCounter) -> NumericMatrix {
        debug_assert_eq!(weights.len(), self.rows());
        counter.mul(self.stored());
        match self {
            NumericMatrix::Dense(m) => {
                let mut out = m.clone();
                for (r, &w) in weights.iter().enumerate() {
                    for v in out.row_mut(r) {
                        *v *= w;
                    }
                }
                out.into()
            }
            NumericMatrix::Sparse(m) => m.scale_rows(weights).into(),
        }
    }

    /// Horizontal concatenation. The result is sparse if any part is sparse.
    pub fn hstack(parts: &[&NumericMatrix]) -> Result<NumericMatrix> {
        let rows = parts.first().map_or(0, |p| p.rows());
        if let Some(bad) = parts.iter().find(|p| p.rows() != rows) {
            return Err(Error::shape("hstack", (rows, 0), bad.shape()));
        }
        if parts.iter().all(|p| !p.is_sparse()) {
            let dense: Vec<&DenseMatrix> = parts.iter().filter_map(|p| p.as_dense()).collect();
            return DenseMatrix::hstack(&dense).map(Into::into);
        }
        let cols: usize = parts.iter().map(|p| p.cols()).sum();
        let mut offsets = Vec::with_capacity(rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for r in 0..rows {
            let mut base = 0;
            for p in parts {
                match p {
                    NumericMatrix::Dense(m) => {
                        for (c, &v) in m.row(r).iter().enumerate() {
                            if v != 0.0 {
                                indices.push(base + c);
                                values.push(v);
                            }
                        }
                    }
                    NumericMatrix::Sparse(m) => {
                        let (idx, val) = m.row(r);
                        indices.extend(idx.iter().map(|c| base + c));
                        values.extend_from_slice(val);
                    }
                }
                base += p.cols();
            }
            offsets.push(indices.len());
        }
        Ok(CsrMatrix::from_parts_unchecked(rows, cols, offsets, indices, values).into())
    }

    pub fn max_abs(&self) -> f64 {
        match self {
            NumericMatrix::Dense(m) => m.max_abs(),
            NumericMatrix::Sparse(m) => m.values().iter().fold(0.0, |a, v| a.max(v.abs())),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            NumericMatrix::Dense(m) => m.is_finite(),
            NumericMatrix::Sparse(m) => m.values().iter().all(|v| v.is_finite()),
        }
    }
}
