//! Products of two normalized matrices (PK-FK only).

use crate::kernel::{matmul, matmul_t, tmatmul, CsrMatrix, DenseMatrix, NumericMatrix, OpCounter};
use crate::normmat::{IndicatorMatrix, JoinKind, NormalizedMatrix};
use crate::{Error, Result};

/// Which Gram-like product of two normalized matrices to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GramForm {
    /// `A · Bᵀ`
    ABt,
    /// `Aᵀ · B`
    AtB,
}

struct Parts<'a> {
    s: &'a NumericMatrix,
    k: &'a IndicatorMatrix,
    r: &'a NumericMatrix,
}

fn parts(nm: &NormalizedMatrix) -> Result<Parts<'_>> {
    if nm.kind() != JoinKind::PkFk {
        return Err(Error::Unsupported("products of two normalized matrices are defined for PK-FK joins only"));
    }
    let s = nm.entity().expect("PK-FK joins have an entity table");
    let (k, r) = nm.attributes().next().expect("PK-FK joins have one attribute table");
    Ok(Parts { s, k, r })
}

fn add_gathered(out: &mut DenseMatrix, k: &IndicatorMatrix, y: &DenseMatrix, counter: &mut OpCounter) -> Result<()> {
    k.gather_into(y, out, true, counter)
}

/// `out[a, b] += m[ka[a], kb[b]]`, i.e. `out += K_A m K_Bᵀ`.
fn add_double_gathered(
    out: &mut DenseMatrix,
    ka: &IndicatorMatrix,
    m: &DenseMatrix,
    kb: &IndicatorMatrix,
    counter: &mut OpCounter,
) {
    counter.add(ka.rows() * kb.rows());
    for (a, &ta) in ka.target().iter().enumerate() {
        let src = m.row(ta);
        for (o, &tb) in out.row_mut(a).iter_mut().zip(kb.target()) {
            *o += src[tb];
        }
    }
}

/// `A · B` for untransposed A and B:
/// `[S_A S_B1 + K_A(R_A S_B2), (S_A K_B1) R_B + K_A((R_A K_B2) R_B)]`,
/// where `S_B1/K_B1` are the first `d_{S_A}` rows of `S_B/K_B`.
fn ab_base(a: &NormalizedMatrix, b: &NormalizedMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let pa = parts(a)?;
    let pb = parts(b)?;
    let ds_a = pa.s.cols();
    let n_b = b.base_rows();
    let s_b1 = pb.s.slice_rows(0..ds_a);
    let s_b2 = pb.s.slice_rows(ds_a..n_b);
    let k_b1 = pb.k.slice_rows(0..ds_a);
    let k_b2 = pb.k.slice_rows(ds_a..n_b);

    let mut left = matmul(pa.s, &s_b1, counter)?.into_dense();
    add_gathered(&mut left, pa.k, &matmul(pa.r, &s_b2, counter)?.into_dense(), counter)?;

    let sa_kb1: NumericMatrix = k_b1.right_apply(&pa.s.to_dense(), counter)?.into();
    let mut right = matmul(&sa_kb1, pb.r, counter)?.into_dense();
    let ra_kb2: NumericMatrix = k_b2.right_apply(&pa.r.to_dense(), counter)?.into();
    add_gathered(&mut right, pa.k, &matmul(&ra_kb2, pb.r, counter)?.into_dense(), counter)?;

    DenseMatrix::hstack(&[&left, &right])
}

/// `A · Bᵀ` for untransposed A and B with equal logical widths.
fn abt_base(a: &NormalizedMatrix, b: &NormalizedMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let pa = parts(a)?;
    let pb = parts(b)?;
    let (ds_a, ds_b) = (pa.s.cols(), pb.s.cols());
    if ds_a > ds_b {
        return Ok(abt_base(b, a, counter)?.transpose());
    }
    // ds_a <= ds_b: split S_B columns at ds_a and R_A columns at ds_b - ds_a
    let split = ds_b - ds_a;
    let s_b1 = pb.s.slice_cols(0..ds_a);
    let mut out = matmul_t(pa.s, &s_b1, counter)?.into_dense();
    if split > 0 {
        let r_a1 = pa.r.slice_cols(0..split);
        let s_b2 = pb.s.slice_cols(ds_a..ds_b);
        add_gathered(&mut out, pa.k, &matmul_t(&r_a1, &s_b2, counter)?.into_dense(), counter)?;
    }
    let r_a2 = if split > 0 { pa.r.slice_cols(split..pa.r.cols()) } else { pa.r.clone() };
    let rr = matmul_t(&r_a2, pb.r, counter)?.into_dense();
    add_double_gathered(&mut out, pa.k, &rr, pb.k, counter);
    Ok(out)
}

/// `Aᵀ · B` for untransposed A and B with equal row counts, computing
/// `P = K_Aᵀ K_B` before the fourth tile `R_Aᵀ P R_B`.
fn atb_base(a: &NormalizedMatrix, b: &NormalizedMatrix, counter: &mut OpCounter) -> Result<DenseMatrix> {
    let pa = parts(a)?;
    let pb = parts(b)?;
    let (ds_a, ds_b) = (pa.s.cols(), pb.s.cols());
    let mut out = DenseMatrix::zeros(a.base_cols(), b.base_cols());

    out.set_block(0, 0, &tmatmul(pa.s, pb.s, counter)?.into_dense());
    let kbt_sa: NumericMatrix = pb.k.scatter_add(pa.s, counter)?.into();
    out.set_block(0, ds_b, &tmatmul(&kbt_sa, pb.r, counter)?.into_dense());
    let kat_sb: NumericMatrix = pa.k.scatter_add(pb.s, counter)?.into();
    out.set_block(ds_a, 0, &tmatmul(pa.r, &kat_sb, counter)?.into_dense());

    let p = pa.k.cross(pb.k, counter)?;
    debug_assert!(
        !(pa.k.is_surjective() && pb.k.is_surjective())
            || (p.nnz() >= pa.r.rows().max(pb.r.rows()) && p.nnz() <= a.base_rows())
    );
    let p_rb = matmul(&p.into(), pb.r, counter)?;
    out.set_block(ds_a, ds_b, &tmatmul(pa.r, &p_rb, counter)?.into_dense());
    Ok(out)
}

/// `P = K_Aᵀ K_B` for two PK-FK matrices over the same entity rows.
pub fn dmm_overlap(a: &NormalizedMatrix, b: &NormalizedMatrix, counter: &mut OpCounter) -> Result<CsrMatrix> {
    let pa = parts(a)?;
    let pb = parts(b)?;
    pa.k.cross(pb.k, counter)
}

/// Product of two normalized matrices, honoring both transpose flags:
/// `AᵀBᵀ` runs as `(BA)ᵀ`, `ABᵀ` and `AᵀB` use their dedicated rewrites.
pub fn dmm(a: &NormalizedMatrix, b: &NormalizedMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::shape("dmm", a.shape(), b.shape()));
    }
    let out = match (a.is_transposed(), b.is_transposed()) {
        (false, false) => ab_base(a, b, counter)?,
        (true, true) => ab_base(b, a, counter)?.transpose(),
        (false, true) => abt_base(a, b, counter)?,
        (true, false) => atb_base(a, b, counter)?,
    };
    Ok(out.into())
}

/// `A · Bᵀ` or `Aᵀ · B` of the logical matrices.
pub fn dmm_gram(
    a: &NormalizedMatrix,
    b: &NormalizedMatrix,
    form: GramForm,
    counter: &mut OpCounter,
) -> Result<NumericMatrix> {
    match form {
        GramForm::ABt => dmm(a, &b.transpose(), counter),
        GramForm::AtB => dmm(&a.transpose(), b, counter),
    }
}
