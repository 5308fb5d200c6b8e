use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::DenseMatrix;
use crate::{Error, Result};

/// Compressed-sparse-row matrix.
///
/// Column indices are strictly increasing within a row. Explicit zeros are
/// allowed but never produced by the constructors in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(rows: usize, cols: usize, offsets: Vec<usize>, indices: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if offsets.len() != rows + 1 || offsets[0] != 0 {
            return Err(Error::InvalidMatrix(format!("row offsets must have length {} and start at 0", rows + 1)));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidMatrix("row offsets must be non-decreasing".into()));
        }
        let nnz = offsets[rows];
        if indices.len() != nnz || values.len() != nnz {
            return Err(Error::InvalidMatrix(format!(
                "expected {nnz} stored entries, got {} indices and {} values",
                indices.len(),
                values.len()
            )));
        }
        for r in 0..rows {
            let idx = &indices[offsets[r]..offsets[r + 1]];
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!("column indices of row {r} are not strictly increasing")));
            }
            if idx.last().is_some_and(|&c| c >= cols) {
                return Err(Error::InvalidMatrix(format!("row {r} has a column index >= {cols}")));
            }
        }
        Ok(CsrMatrix { rows, cols, offsets, indices, values })
    }

    pub(crate) fn from_parts_unchecked(
        rows: usize,
        cols: usize,
        offsets: Vec<usize>,
        indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(offsets.len(), rows + 1);
        CsrMatrix { rows, cols, offsets, indices, values }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CsrMatrix { rows, cols, offsets: vec![0; rows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut offsets = Vec::with_capacity(m.rows() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for row in m.iter_rows() {
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        CsrMatrix { rows: m.rows(), cols: m.cols(), offsets, indices, values }
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// zeros dropped.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= rows || *c >= cols) {
            return Err(Error::InvalidMatrix(format!("triplet ({r}, {c}) outside a {rows}x{cols} matrix")));
        }
        triplets.sort_by_key(|t| (t.0, t.1));
        let mut offsets = vec![0; rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((r, c));
            indices.push(c);
            values.push(v);
            offsets[r + 1] += 1;
        }
        for r in 0..rows {
            offsets[r + 1] += offsets[r];
        }
        let m = CsrMatrix { rows, cols, offsets, indices, values };
        Ok(m.pruned())
    }

    fn pruned(self) -> Self {
        if self.values.iter().all(|v| *v != 0.0) {
            return self;
        }
        let mut offsets = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                if v != 0.0 {
                    indices.push(c);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        CsrMatrix { rows: self.rows, cols: self.cols, offsets, indices, values }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.offsets[r]..self.offsets[r + 1];
        (&self.indices[span.clone()], &self.values[span])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (idx, val) = self.row(r);
        match idx.binary_search(&c) {
            Ok(p) => val[p],
            Err(_) => 0.0,
        }
    }

    pub fn density(&self) -> f64 {
        let cells = self.rows * self.cols;
        if cells == 0 {
            0.0
        } else {
            self.nnz() as f64 / cells as f64
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            let dst = out.row_mut(r);
            for (&c, &v) in idx.iter().zip(val) {
                dst[c] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let offsets = counts.clone();
        let mut next = counts;
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                let p = next[c];
                indices[p] = r;
                values[p] = v;
                next[c] += 1;
            }
        }
        CsrMatrix { rows: self.cols, cols: self.rows, offsets, indices, values }
    }

    pub fn select_rows(&self, rows: &[usize]) -> CsrMatrix {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for &r in rows {
            let (idx, val) = self.row(r);
            indices.extend_from_slice(idx);
            values.extend_from_slice(val);
            offsets.push(indices.len());
        }
        CsrMatrix { rows: rows.len(), cols: self.cols, offsets, indices, values }
    }

    pub fn slice_rows(&self, range: Range<usize>) -> CsrMatrix {
        let rows: Vec<usize> = range.collect();
        self.select_rows(&rows)
    }

    pub fn slice_cols(&self, range: Range<usize>) -> CsrMatrix {
        let mut offsets = Vec::with_capacity(self.rows + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for r in 0..self.rows {
            let (idx, val) = self.row(r);
            for (&c, &v) in idx.iter().zip(val) {
                if range.contains(&c) {
                    indices.push(c - range.start);
                    values.push(v);
                }
            }
            offsets.push(indices.len());
        }
        CsrMatrix { rows: self.rows, cols: range.len(), offsets, indices, values }
    }

    /// Multiplies row `r` by `weights[r]`.
    pub fn scale_rows(&self, weights: &[f64]) -> CsrMatrix {
        let mut out = self.clone();
        for (r, &w) in weights.iter().enumerate().take(self.rows) {
            for v in &mut out.values[self.offsets[r]..self.offsets[r + 1]] {
                *v *= w;
            }
        }
        out
    }
}
