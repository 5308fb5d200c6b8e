use alloc::vec::Vec;

use crate::kernel::ops::fill_rows;
use crate::kernel::{matmul, tmatmul, DenseMatrix, NumericMatrix, OpCounter};
use crate::normmat::{IndicatorMatrix, NormalizedMatrix};
use crate::{Error, Result};

/// Adds `I · y` into `out`, or initializes `out` with it.
fn accumulate(
    out: &mut Option<DenseMatrix>,
    indicator: Option<&IndicatorMatrix>,
    y: DenseMatrix,
    rows: usize,
    counter: &mut OpCounter,
) -> Result<()> {
    match (indicator, out.as_mut()) {
        (None, None) => *out = Some(y),
        (None, Some(o)) => {
            counter.add(y.rows() * y.cols());
            o.add_assign(&y)?;
        }
        (Some(k), None) => {
            let mut o = DenseMatrix::zeros(rows, y.cols());
            k.gather_into(&y, &mut o, false, counter)?;
            *out = Some(o);
        }
        (Some(k), Some(o)) => k.gather_into(&y, o, true, counter)?,
    }
    Ok(())
}

/// `T · X = Σ_j I_j (B_j X_j)` over the untransposed blocks, where `X_j` is
/// the row slice of `X` matching block `j`. The product with `B_j` always
/// precedes the indicator.
pub(crate) fn lmm_base(nm: &NormalizedMatrix, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    if x.rows() != nm.base_cols() {
        return Err(Error::shape("lmm", (nm.base_rows(), nm.base_cols()), x.shape()));
    }
    let offsets = nm.offsets();
    let blocks = nm.blocks();
    if blocks.len() > 1 && blocks.iter().all(|b| b.indicator().is_some()) {
        return lmm_gathered(nm, x, counter);
    }
    let mut out = None;
    for (j, b) in blocks.iter().enumerate() {
        let y = if blocks.len() == 1 {
            matmul(b.table(), x, counter)?
        } else {
            matmul(b.table(), &x.slice_rows(offsets[j]..offsets[j + 1]), counter)?
        };
        accumulate(&mut out, b.indicator(), y.into_dense(), nm.base_rows(), counter)?;
    }
    Ok(out.unwrap_or_else(|| DenseMatrix::zeros(nm.base_rows(), x.cols())))
}

/// `T · X` when every block has an indicator (M:N joins): the small
/// products `B_j X_j` come first, then each output row is written once as
/// the sum of its gathered rows, instead of one pass over the (large)
/// output per block.
fn lmm_gathered(nm: &NormalizedMatrix, x: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let offsets = nm.offsets();
    let mut sources = Vec::with_capacity(nm.blocks().len());
    for (j, b) in nm.blocks().iter().enumerate() {
        let y = matmul(b.table(), &x.slice_rows(offsets[j]..offsets[j + 1]), counter)?.into_dense();
        let k = b.indicator().expect("every block has an indicator");
        sources.push((k.target(), y));
    }
    let p = x.cols();
    // the first gathered block is a copy, every further one an addition
    counter.add(nm.base_rows() * p * (sources.len() - 1));
    let mut out = DenseMatrix::zeros(nm.base_rows(), p);
    fill_rows(&mut out, |r, o| {
        let (first, rest) = sources.split_first().expect("at least two blocks");
        o.copy_from_slice(first.1.row(first.0[r]));
        for (target, y) in rest {
            for (a, b) in o.iter_mut().zip(y.row(target[r])) {
                *a += b;
            }
        }
    });
    Ok(out)
}

/// `Tᵀ · V`, stacking `B_jᵀ (I_jᵀ V)` over the untransposed blocks.
pub(crate) fn tlmm_base(nm: &NormalizedMatrix, v: &NumericMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    if v.rows() != nm.base_rows() {
        return Err(Error::shape("transposed lmm", (nm.base_cols(), nm.base_rows()), v.shape()));
    }
    let parts = nm
        .blocks()
        .iter()
        .map(|b| {
            let p = match b.indicator() {
                None => tmatmul(b.table(), v, counter)?,
                Some(k) => tmatmul(b.table(), &k.scatter_add(v, counter)?.into(), counter)?,
            };
            Ok(p.into_dense())
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DenseMatrix> = parts.iter().collect();
    if refs.is_empty() {
        return Ok(DenseMatrix::zeros(0, v.cols()));
    }
    DenseMatrix::vstack(&refs)
}

/// `X · T = [(X I_j) B_j]_j` over the untransposed blocks. `X · I_j` is
/// applied before the product with `B_j`.
pub(crate) fn rmm_base(x: &NumericMatrix, nm: &NormalizedMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    if x.cols() != nm.base_rows() {
        return Err(Error::shape("rmm", x.shape(), (nm.base_rows(), nm.base_cols())));
    }
    let xd = if nm.blocks().iter().any(|b| b.indicator().is_some()) { Some(x.to_dense()) } else { None };
    let parts = nm
        .blocks()
        .iter()
        .map(|b| {
            let p = match (b.indicator(), &xd) {
                (Some(k), Some(xd)) => matmul(&k.right_apply(xd, counter)?.into(), b.table(), counter)?,
                _ => matmul(x, b.table(), counter)?,
            };
            Ok(p.into_dense())
        })
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DenseMatrix> = parts.iter().collect();
    if refs.is_empty() {
        return Ok(DenseMatrix::zeros(x.rows(), 0));
    }
    DenseMatrix::hstack(&refs)
}

/// Left matrix multiplication `T · X`.
///
/// For a transposed input this evaluates `Tᵀ X` directly over the base
/// tables (the transposed form of the right-multiplication rule).
pub fn lmm(nm: &NormalizedMatrix, x: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if x.rows() != nm.ncols() {
        return Err(Error::shape("lmm", nm.shape(), x.shape()));
    }
    let out = if nm.is_transposed() { tlmm_base(nm, x, counter)? } else { lmm_base(nm, x, counter)? };
    Ok(out.into())
}

/// Right matrix multiplication `X · T`.
///
/// For a transposed input, `X Tᵀ = (T Xᵀ)ᵀ` via the left-multiplication rule.
pub fn rmm(x: &NumericMatrix, nm: &NormalizedMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if x.cols() != nm.nrows() {
        return Err(Error::shape("rmm", x.shape(), nm.shape()));
    }
    let out =
        if nm.is_transposed() { lmm_base(nm, &x.transpose(), counter)?.transpose() } else { rmm_base(x, nm, counter)? };
    Ok(out.into())
}

/// `Tᵀ · V` for the logical matrix `T`, without building `Tᵀ`.
pub fn tlmm(nm: &NormalizedMatrix, v: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if v.rows() != nm.nrows() {
        return Err(Error::shape("transposed lmm", (nm.ncols(), nm.nrows()), v.shape()));
    }
    let out = if nm.is_transposed() { lmm_base(nm, v, counter)? } else { tlmm_base(nm, v, counter)? };
    Ok(out.into())
}
