//! Numeric matrix layer: dense and CSR storage, instrumented products and
//! the SVD-based pseudo-inverse.

mod counter;
mod dense;
pub mod elementwise;
mod matrix;
pub mod ops;
mod sparse;
pub mod svd;

pub use counter::OpCounter;
pub use dense::DenseMatrix;
pub use elementwise::{ElementwiseOp, ScalarOp};
pub use matrix::NumericMatrix;
pub use ops::{crossprod, matmul, matmul_t, row_min_mask, tcrossprod, tmatmul};
pub use sparse::CsrMatrix;
pub use svd::{numeric_rank, pinv_dense, pinv_gram, pinv_with_tolerance, singular_values};
