use core::str::FromStr;

use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::Float;

use super::multiply::{lmm_base, tlmm_base};
use crate::kernel::{self, matmul, tcrossprod, tmatmul, DenseMatrix, NumericMatrix, OpCounter};
use crate::normmat::{Block, NormalizedMatrix};
use crate::{Error, Result};

/// Strategy for the factorized cross-product.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum CrossprodMethod {
    /// Full `BᵀB` products and an explicit `IᵀI` sparse product per block.
    Naive,
    /// Symmetric `crossprod` per block, with `IᵀI` replaced by row scaling
    /// with the square roots of the indicator column counts.
    #[default]
    Efficient,
}

impl FromStr for CrossprodMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(CrossprodMethod::Naive),
            "efficient" => Ok(CrossprodMethod::Efficient),
            other => Err(Error::UnknownOperator(other.to_string())),
        }
    }
}

/// Diagonal block `B_jᵀ I_jᵀ I_j B_j`.
fn diagonal_block(b: &Block, method: CrossprodMethod, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let t = b.table();
    Ok(match (method, b.indicator()) {
        (CrossprodMethod::Efficient, None) => kernel::crossprod(t, counter),
        (CrossprodMethod::Efficient, Some(k)) => {
            let weights: Vec<f64> = k.col_counts(counter).into_iter().map(|c| Float::sqrt(c as f64)).collect();
            kernel::crossprod(&t.scale_rows(&weights, counter), counter)
        }
        (CrossprodMethod::Naive, None) => tmatmul(t, t, counter)?.into_dense(),
        (CrossprodMethod::Naive, Some(k)) => {
            let kc = k.to_csr();
            let ktk: NumericMatrix = matmul(&kc.transpose().into(), &kc.into(), counter)?;
            tmatmul(t, &matmul(&ktk, t, counter)?, counter)?.into_dense()
        }
    })
}

/// Off-diagonal block `B_iᵀ I_iᵀ I_j B_j`.
fn cross_block(bi: &Block, bj: &Block, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let (ti, tj) = (bi.table(), bj.table());
    Ok(match (bi.indicator(), bj.indicator()) {
        (None, None) => tmatmul(ti, tj, counter)?,
        (Some(ki), None) => tmatmul(ti, &ki.scatter_add(tj, counter)?.into(), counter)?,
        (None, Some(kj)) => tmatmul(&kj.scatter_add(ti, counter)?.into(), tj, counter)?,
        (Some(ki), Some(kj)) => {
            let overlap: NumericMatrix = ki.cross(kj, counter)?.into();
            tmatmul(ti, &matmul(&overlap, tj, counter)?, counter)?
        }
    }
    .into_dense())
}

/// `TᵀT` over the untransposed blocks. Only the lower block triangle is
/// computed; the upper triangle is its mirror, so the result is exactly
/// symmetric.
pub(crate) fn crossprod_base(
    nm: &NormalizedMatrix,
    method: CrossprodMethod,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    let offsets = nm.offsets();
    let d = nm.base_cols();
    let blocks = nm.blocks();
    let mut out = DenseMatrix::zeros(d, d);
    for (i, bi) in blocks.iter().enumerate() {
        if bi.width() == 0 {
            continue;
        }
        out.set_block(offsets[i], offsets[i], &diagonal_block(bi, method, counter)?);
        for (j, bj) in blocks.iter().enumerate().take(i) {
            if bj.width() == 0 {
                continue;
            }
            out.set_block(offsets[i], offsets[j], &cross_block(bi, bj, counter)?);
        }
    }
    for r in 0..d {
        for c in (r + 1)..d {
            let v = out.get(c, r);
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// `T Tᵀ = Σ_j I_j (B_j B_jᵀ) I_jᵀ` over the untransposed blocks.
pub(crate) fn gram_base(nm: &NormalizedMatrix, counter: &mut OpCounter) -> DenseMatrix {
    let n = nm.base_rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (j, b) in nm.blocks().iter().enumerate() {
        if b.width() == 0 {
            continue;
        }
        let g = tcrossprod(b.table(), counter);
        if j > 0 {
            counter.add(n * n);
        }
        match b.indicator() {
            None => {
                for (o, v) in out.data_mut().iter_mut().zip(g.data()) {
                    *o += v;
                }
            }
            Some(k) => {
                let t = k.target();
                for (a, &ta) in t.iter().enumerate() {
                    let src = g.row(ta);
                    let dst = out.row_mut(a);
                    for (o, &tb) in dst.iter_mut().zip(t) {
                        *o += src[tb];
                    }
                }
            }
        }
    }
    out
}

/// Cross-product `TᵀT` of the logical matrix.
///
/// A transposed input evaluates the Gram rule `T Tᵀ` of the untransposed
/// matrix.
pub fn crossprod(nm: &NormalizedMatrix, method: CrossprodMethod, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if nm.is_transposed() {
        Ok(gram_base(nm, counter).into())
    } else {
        crossprod_base(nm, method, counter).map(Into::into)
    }
}

/// `T Tᵀ` of the logical matrix (the cross-product of its transpose).
pub fn gram_transposed(nm: &NormalizedMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if nm.is_transposed() {
        crossprod_base(nm, CrossprodMethod::Efficient, counter).map(Into::into)
    } else {
        Ok(gram_base(nm, counter).into())
    }
}

/// Moore–Penrose pseudo-inverse of the logical matrix.
///
/// With `T` the untransposed `n × d` matrix: `ginv(T) = ginv(TᵀT) Tᵀ` when
/// `d < n`, and `Tᵀ ginv(T Tᵀ)` otherwise. The outer product with `T` runs
/// through the factorized multiplication rules. A transposed input returns
/// `ginv(T)ᵀ`.
pub fn ginv(nm: &NormalizedMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    let (n, d) = (nm.base_rows(), nm.base_cols());
    let g = if d < n {
        let p = kernel::pinv_gram(&crossprod_base(nm, CrossprodMethod::Efficient, counter)?, n)?;
        lmm_base(nm, &p.transpose().into(), counter)?.transpose()
    } else {
        let p = kernel::pinv_gram(&gram_base(nm, counter), d)?;
        tlmm_base(nm, &p.into(), counter)?
    };
    Ok(if nm.is_transposed() { g.transpose() } else { g }.into())
}
