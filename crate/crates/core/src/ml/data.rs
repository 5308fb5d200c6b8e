use alloc::vec::Vec;

use crate::costmodel::{AutoData, AutoMatrix, AutoView};
use crate::kernel::{self, elementwise, CsrMatrix, DenseMatrix, NumericMatrix, OpCounter, ScalarOp};
use crate::normmat::NormalizedMatrix;
use crate::rewrite::{self, CrossprodMethod};
use crate::Result;

/// The operators the training algorithms need from a data matrix `T`.
pub trait DataMatrix: Sized {
    fn nrows(&self) -> usize;

    fn ncols(&self) -> usize;

    /// `T · X`
    fn lmm(&self, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix>;

    /// `Tᵀ · V`
    fn tlmm(&self, v: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix>;

    /// `TᵀT`
    fn crossprod(&self, counter: &mut OpCounter) -> Result<DenseMatrix>;

    fn row_sums(&self, counter: &mut OpCounter) -> Vec<f64>;

    fn sum_all(&self, counter: &mut OpCounter) -> f64;

    fn scalar_op(&self, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<Self>;

    fn scalar_fn<F: Fn(f64) -> f64>(&self, f: F, counter: &mut OpCounter) -> Result<Self>;

    fn is_nonnegative(&self) -> bool;

    /// The given rows of `T` as the columns of a `d × k` matrix, computed as
    /// `Tᵀ E` with a 0/1 selector `E`.
    fn rows_as_columns(&self, rows: &[usize], counter: &mut OpCounter) -> Result<DenseMatrix> {
        let triplets = rows.iter().enumerate().map(|(j, &r)| (r, j, 1.0)).collect();
        let selector = CsrMatrix::from_triplets(self.nrows(), rows.len(), triplets)?;
        self.tlmm(&selector.into(), counter)
    }
}

impl DataMatrix for NumericMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn lmm(&self, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        kernel::matmul(self, x, counter).map(NumericMatrix::into_dense)
    }

    fn tlmm(&self, v: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        kernel::tmatmul(self, v, counter).map(NumericMatrix::into_dense)
    }

    fn crossprod(&self, counter: &mut OpCounter) -> Result<DenseMatrix> {
        Ok(kernel::crossprod(self, counter))
    }

    fn row_sums(&self, counter: &mut OpCounter) -> Vec<f64> {
        NumericMatrix::row_sums(self, counter)
    }

    fn sum_all(&self, counter: &mut OpCounter) -> f64 {
        self.sum(counter)
    }

    fn scalar_op(&self, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<Self> {
        elementwise::scalar_op(self, x, op, counter)
    }

    fn scalar_fn<F: Fn(f64) -> f64>(&self, f: F, counter: &mut OpCounter) -> Result<Self> {
        Ok(self.map_elements(f, counter))
    }

    fn is_nonnegative(&self) -> bool {
        match self {
            NumericMatrix::Dense(m) => m.data().iter().all(|&v| v >= 0.0),
            NumericMatrix::Sparse(m) => m.values().iter().all(|&v| v >= 0.0),
        }
    }
}

impl DataMatrix for NormalizedMatrix {
    fn nrows(&self) -> usize {
        NormalizedMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        NormalizedMatrix::ncols(self)
    }

    fn lmm(&self, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        rewrite::lmm(self, x, counter).map(NumericMatrix::into_dense)
    }

    fn tlmm(&self, v: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        rewrite::tlmm(self, v, counter).map(NumericMatrix::into_dense)
    }

    fn crossprod(&self, counter: &mut OpCounter) -> Result<DenseMatrix> {
        rewrite::crossprod(self, CrossprodMethod::Efficient, counter).map(NumericMatrix::into_dense)
    }

    fn row_sums(&self, counter: &mut OpCounter) -> Vec<f64> {
        rewrite::row_sums(self, counter).into_dense().into_vec()
    }

    fn sum_all(&self, counter: &mut OpCounter) -> f64 {
        rewrite::sum_all(self, counter)
    }

    fn scalar_op(&self, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<Self> {
        rewrite::scalar_op(self, x, op, counter)
    }

    fn scalar_fn<F: Fn(f64) -> f64>(&self, f: F, counter: &mut OpCounter) -> Result<Self> {
        rewrite::scalar_fn(self, f, counter)
    }

    fn is_nonnegative(&self) -> bool {
        self.blocks().iter().all(|b| b.table().is_nonnegative())
    }
}

macro_rules! either {
    ($auto:expr, $m:ident => $body:expr) => {
        match $auto.view() {
            AutoView::Factorized($m) => $body,
            AutoView::Materialized($m) => $body,
        }
    };
}

impl DataMatrix for AutoMatrix {
    fn nrows(&self) -> usize {
        either!(self, m => DataMatrix::nrows(m))
    }

    fn ncols(&self) -> usize {
        either!(self, m => DataMatrix::ncols(m))
    }

    fn lmm(&self, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        either!(self, m => m.lmm(x, counter))
    }

    fn tlmm(&self, v: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
        either!(self, m => m.tlmm(v, counter))
    }

    fn crossprod(&self, counter: &mut OpCounter) -> Result<DenseMatrix> {
        either!(self, m => DataMatrix::crossprod(m, counter))
    }

    fn row_sums(&self, counter: &mut OpCounter) -> Vec<f64> {
        either!(self, m => DataMatrix::row_sums(m, counter))
    }

    fn sum_all(&self, counter: &mut OpCounter) -> f64 {
        either!(self, m => m.sum_all(counter))
    }

    fn scalar_op(&self, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<Self> {
        let data = match self.view() {
            AutoView::Factorized(m) => AutoData::Factorized(DataMatrix::scalar_op(m, x, op, counter)?),
            AutoView::Materialized(m) => AutoData::Materialized(DataMatrix::scalar_op(m, x, op, counter)?),
        };
        Ok(self.replace_data(data))
    }

    fn scalar_fn<F: Fn(f64) -> f64>(&self, f: F, counter: &mut OpCounter) -> Result<Self> {
        let data = match self.view() {
            AutoView::Factorized(m) => AutoData::Factorized(DataMatrix::scalar_fn(m, f, counter)?),
            AutoView::Materialized(m) => AutoData::Materialized(DataMatrix::scalar_fn(m, f, counter)?),
        };
        Ok(self.replace_data(data))
    }

    fn is_nonnegative(&self) -> bool {
        either!(self, m => m.is_nonnegative())
    }
}
