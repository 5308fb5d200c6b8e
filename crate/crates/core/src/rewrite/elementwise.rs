use core::sync::atomic::{AtomicBool, Ordering};

use crate::kernel::elementwise::{self, ElementwiseOp, ScalarOp};
use crate::kernel::{NumericMatrix, OpCounter};
use crate::normmat::NormalizedMatrix;
use crate::{Error, Result};

static MATERIALIZATION_ADVISED: AtomicBool = AtomicBool::new(false);

/// `T ⊘ x` applied to the base tables only; indicators and the transpose
/// flag are shared with the input.
pub fn scalar_op(nm: &NormalizedMatrix, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<NormalizedMatrix> {
    op.check(x)?;
    nm.map_tables(|t| elementwise::scalar_op(t, x, op, counter))
}

/// `f(T)` applied to the base tables only.
///
/// Sound for any element-wise `f` because indicators only select rows. A
/// sparse base table is densified when `f(0) != 0`.
pub fn scalar_fn(nm: &NormalizedMatrix, f: impl Fn(f64) -> f64, counter: &mut OpCounter) -> Result<NormalizedMatrix> {
    nm.map_tables(|t| Ok(t.map_elements(&f, counter)))
}

/// `T ⊘ X` for a regular matrix `X`. This operator has no factorized form:
/// the normalized matrix is materialized and a regular matrix returned.
pub fn elementwise_matrix_op(
    nm: &NormalizedMatrix,
    x: &NumericMatrix,
    op: ElementwiseOp,
    counter: &mut OpCounter,
) -> Result<NumericMatrix> {
    if x.shape() != nm.shape() {
        return Err(Error::shape("elementwise", nm.shape(), x.shape()));
    }
    if !MATERIALIZATION_ADVISED.swap(true, Ordering::Relaxed) {
        log::warn!("element-wise matrix arithmetic is not factorizable; the normalized matrix is materialized for it");
    }
    let t = nm.materialize();
    elementwise::elementwise(&t, x, op, counter).map(Into::into)
}
