use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::kernel::{CsrMatrix, DenseMatrix, NumericMatrix, OpCounter};
use crate::{Error, Result};

/// Sparse 0/1 row-selection matrix with exactly one nonzero per row.
///
/// Row `i` has its single 1 at column `target[i]`. Products with indicator
/// matrices are never executed as general sparse multiplies: `K·M` is a row
/// gather, `Kᵀ·M` a scatter-add and `colSums(K)` a histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorMatrix {
    cols: usize,
    target: Vec<usize>,
}

impl IndicatorMatrix {
    /// Validates that every target is `< cols` and every column is hit at
    /// least once.
    pub fn new(cols: usize, target: Vec<usize>) -> Result<Self> {
        let m = Self::with_unreferenced_columns(cols, target)?;
        if let Some(c) = m.column_hits().iter().position(|&h| !h) {
            return Err(Error::InvalidMatrix(format!(
                "indicator column {c} has no nonzero; unreferenced rows must be dropped"
            )));
        }
        Ok(m)
    }

    /// Like [`IndicatorMatrix::new`] but allows columns without a nonzero.
    pub fn with_unreferenced_columns(cols: usize, target: Vec<usize>) -> Result<Self> {
        if let Some((i, &t)) = target.iter().enumerate().find(|(_, &t)| t >= cols) {
            return Err(Error::InvalidMatrix(format!(
                "indicator row {i} targets column {t}, but there are only {cols} columns"
            )));
        }
        Ok(IndicatorMatrix { cols, target })
    }

    /// The `n × n` identity as an indicator.
    pub fn identity(n: usize) -> Self {
        IndicatorMatrix { cols: n, target: (0..n).collect() }
    }

    pub(crate) fn from_targets_unchecked(cols: usize, target: Vec<usize>) -> Self {
        debug_assert!(target.iter().all(|&t| t < cols));
        IndicatorMatrix { cols, target }
    }

    fn column_hits(&self) -> Vec<bool> {
        let mut hit = vec![false; self.cols];
        for &t in &self.target {
            hit[t] = true;
        }
        hit
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.target.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols)
    }

    /// Column index of the nonzero in each row.
    pub fn target(&self) -> &[usize] {
        &self.target
    }

    pub fn nnz(&self) -> usize {
        self.target.len()
    }

    /// True when every column holds at least one nonzero.
    pub fn is_surjective(&self) -> bool {
        self.column_hits().into_iter().all(|h| h)
    }

    /// Rows `range` of the indicator; columns are kept, so the result may
    /// have empty columns.
    pub(crate) fn slice_rows(&self, range: core::ops::Range<usize>) -> IndicatorMatrix {
        IndicatorMatrix { cols: self.cols, target: self.target[range].to_vec() }
    }

    /// `colSums(K)` as a histogram over targets.
    pub fn col_counts(&self, counter: &mut OpCounter) -> Vec<usize> {
        counter.add(self.rows());
        let mut counts = vec![0usize; self.cols];
        for &t in &self.target {
            counts[t] += 1;
        }
        counts
    }

    /// `K · m`: copies row `target[i]` of `m` to output row `i`.
    pub fn gather(&self, m: &NumericMatrix) -> Result<NumericMatrix> {
        self.check_inner("gather", m.rows())?;
        Ok(m.select_rows(&self.target))
    }

    /// `out += K · m` (or `out = K · m` when `accumulate` is false). Only
    /// accumulation is counted, as additions.
    pub fn gather_into(
        &self,
        m: &DenseMatrix,
        out: &mut DenseMatrix,
        accumulate: bool,
        counter: &mut OpCounter,
    ) -> Result<()> {
        self.check_inner("gather", m.rows())?;
        if out.shape() != (self.rows(), m.cols()) {
            return Err(Error::shape("gather", out.shape(), (self.rows(), m.cols())));
        }
        let p = m.cols();
        if p == 0 {
            return Ok(());
        }
        if accumulate {
            counter.add(self.rows() * p);
        }
        if p == 1 {
            let src = m.data();
            for (o, &t) in out.data_mut().iter_mut().zip(&self.target) {
                if accumulate {
                    *o += src[t];
                } else {
                    *o = src[t];
                }
            }
            return Ok(());
        }
        for (row, &t) in out.data_mut().chunks_mut(p).zip(&self.target) {
            let src = m.row(t);
            if accumulate {
                for (o, s) in row.iter_mut().zip(src) {
                    *o += s;
                }
            } else {
                row.copy_from_slice(src);
            }
        }
        Ok(())
    }

    /// `Kᵀ · m`: adds row `i` of `m` into output row `target[i]`.
    pub fn scatter_add(&self, m: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        if m.rows() != self.rows() {
            return Err(Error::shape("scatter", (self.cols, self.rows()), m.shape()));
        }
        counter.add(m.stored());
        let mut out = DenseMatrix::zeros(self.cols, m.cols());
        match m {
            NumericMatrix::Dense(d) => {
                let p = d.cols();
                if p == 1 {
                    let o = out.data_mut();
                    for (&t, &v) in self.target.iter().zip(d.data()) {
                        o[t] += v;
                    }
                } else {
                    for (i, &t) in self.target.iter().enumerate() {
                        let dst = out.row_mut(t);
                        for (o, s) in dst.iter_mut().zip(d.row(i)) {
                            *o += s;
                        }
                    }
                }
            }
            NumericMatrix::Sparse(s) => {
                for (i, &t) in self.target.iter().enumerate() {
                    let (idx, val) = s.row(i);
                    let dst = out.row_mut(t);
                    for (&c, &v) in idx.iter().zip(val) {
                        dst[c] += v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `x · K`: adds column `i` of `x` into output column `target[i]`.
    pub fn right_apply(&self, x: &DenseMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        if x.cols() != self.rows() {
            return Err(Error::shape("right indicator product", x.shape(), self.shape()));
        }
        counter.add(x.rows() * x.cols());
        let mut out = DenseMatrix::zeros(x.rows(), self.cols);
        for r in 0..x.rows() {
            let src = x.row(r);
            let dst = out.row_mut(r);
            for (&t, &v) in self.target.iter().zip(src) {
                dst[t] += v;
            }
        }
        Ok(out)
    }

    /// `selfᵀ · other` as a sparse matrix of co-occurrence counts.
    pub fn cross(&self, other: &IndicatorMatrix, counter: &mut OpCounter) -> Result<CsrMatrix> {
        if self.rows() != other.rows() {
            return Err(Error::shape("indicator cross product", (self.cols, self.rows()), other.shape()));
        }
        counter.add(self.rows());
        let triplets = self.target.iter().zip(&other.target).map(|(&a, &b)| (a, b, 1.0)).collect();
        CsrMatrix::from_triplets(self.cols, other.cols, triplets)
    }

    /// Explicit CSR representation.
    pub fn to_csr(&self) -> CsrMatrix {
        let offsets = (0..=self.rows()).collect();
        CsrMatrix::from_parts_unchecked(self.rows(), self.cols, offsets, self.target.clone(), vec![1.0; self.rows()])
    }

    fn check_inner(&self, op: &'static str, m_rows: usize) -> Result<()> {
        if m_rows != self.cols {
            return Err(Error::shape(op, self.shape(), (m_rows, 0)));
        }
        Ok(())
    }
}
