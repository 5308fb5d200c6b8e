//! Factorized operators over [`NormalizedMatrix`].
//!
//! Each operator either returns a new normalized matrix sharing the input's
//! indicators (scalar operators) or a regular [`NumericMatrix`], and never
//! materializes the join. Transposed inputs are rewritten into operations on
//! the untransposed matrix.

mod aggregate;
mod crossprod;
mod dmm;
mod elementwise;
mod multiply;

pub use crate::kernel::{ElementwiseOp, ScalarOp};
pub use aggregate::{col_sums, row_sums, sum_all};
pub use crossprod::{crossprod, ginv, gram_transposed, CrossprodMethod};
pub use dmm::{dmm, dmm_gram, dmm_overlap, GramForm};
pub use elementwise::{elementwise_matrix_op, scalar_fn, scalar_op};
pub use multiply::{lmm, rmm, tlmm};

#[cfg(test)]
mod tests;
