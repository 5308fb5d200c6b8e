//! Compares every factorized operator against an independent dense oracle
//! (nalgebra over the materialized matrix).

#![allow(dead_code)]

use nalgebra::DMatrix;
use normat_core::kernel::{ElementwiseOp, ScalarOp};
use normat_core::normmat::synth::{random_dense, random_surjective_targets, random_table};
use normat_core::normmat::IndicatorMatrix;
use normat_core::rewrite::{self, CrossprodMethod, GramForm};
use normat_core::{DenseMatrix, NormalizedMatrix, NumericMatrix, OpCounter};
use rand::Rng;

/// Relative tolerance of every operator except the pseudo-inverse.
pub const OPERATOR_TOLERANCE: f64 = 1e-10;
/// Relative tolerance of the pseudo-inverse.
pub const GINV_TOLERANCE: f64 = 1e-8;
/// Singular values below this fraction of the largest are treated as zero
/// by the pseudo-inverse oracle.
pub const ORACLE_RANK_CUTOFF: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Mismatch {
    pub op: &'static str,
    pub error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Default)]
pub struct OracleReport {
    pub checks: usize,
    pub worst: f64,
    pub worst_ginv: f64,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    fn record(&mut self, op: &'static str, got: &NumericMatrix, want: &DMatrix<f64>, tolerance: f64) {
        let error = relative_error(got, want);
        self.checks += 1;
        if op == "ginv" {
            self.worst_ginv = self.worst_ginv.max(error);
        } else {
            self.worst = self.worst.max(error);
        }
        if error.is_nan() || error > tolerance {
            self.mismatches.push(Mismatch { op, error, tolerance });
        }
    }

    pub fn merge(&mut self, other: OracleReport) {
        self.checks += other.checks;
        self.worst = self.worst.max(other.worst);
        self.worst_ginv = self.worst_ginv.max(other.worst_ginv);
        self.mismatches.extend(other.mismatches);
    }
}

pub fn to_na(m: &NumericMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_row_slice(d.rows(), d.cols(), d.data())
}

pub fn from_na(m: &DMatrix<f64>) -> NumericMatrix {
    let data = (0..m.nrows()).flat_map(|r| (0..m.ncols()).map(move |c| m[(r, c)])).collect();
    DenseMatrix::from_vec(m.nrows(), m.ncols(), data).unwrap().into()
}

/// `max |a − b| / max |b|` (shape mismatch counts as infinite error).
pub fn relative_error(got: &NumericMatrix, want: &DMatrix<f64>) -> f64 {
    if got.shape() != want.shape() {
        return f64::INFINITY;
    }
    let got = got.to_dense();
    let mut diff = 0.0_f64;
    let mut scale = 0.0_f64;
    for r in 0..want.nrows() {
        for c in 0..want.ncols() {
            diff = diff.max((got.get(r, c) - want[(r, c)]).abs());
            scale = scale.max(want[(r, c)].abs());
        }
    }
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}

/// Largest residual of the four Penrose conditions for `p` as `pinv(t)`.
pub fn penrose_residual(t: &DMatrix<f64>, p: &DMatrix<f64>) -> f64 {
    let (tp, pt) = (t * p, p * t);
    [(&tp * t - t).norm(), (&pt * p - p).norm(), (&tp - tp.transpose()).norm(), (&pt - pt.transpose()).norm()]
        .into_iter()
        .fold(0.0, f64::max)
}

/// nalgebra's pseudo-inverse. Its SVD occasionally loses accuracy on a
/// rank-deficient matrix with repeated zero singular values while the SVD
/// of the transpose stays accurate, so both are formed and the one that
/// better satisfies the Penrose conditions is returned.
pub fn oracle_pinv(t: &DMatrix<f64>) -> DMatrix<f64> {
    let sigma_max = t.clone().singular_values().max();
    let cutoff = ORACLE_RANK_CUTOFF * sigma_max;
    let direct = t.clone().pseudo_inverse(cutoff).expect("non-negative cutoff");
    let via_transpose = t.transpose().pseudo_inverse(cutoff).expect("non-negative cutoff").transpose();
    if penrose_residual(t, &via_transpose) < penrose_residual(t, &direct) {
        via_transpose
    } else {
        direct
    }
}

fn scalar_cases(rng: &mut impl Rng) -> Vec<(ScalarOp, f64)> {
    let x = rng.random_range(0.5..2.0);
    vec![
        (ScalarOp::Add, x),
        (ScalarOp::Sub, x),
        (ScalarOp::Mul, x),
        (ScalarOp::Div, x),
        (ScalarOp::Pow, 2.0),
        (ScalarOp::RevSub, x),
        (ScalarOp::RevDiv, x),
        (ScalarOp::RevPow, x),
    ]
}

type ElementwiseCase = (ElementwiseOp, fn(f64, f64) -> f64);

/// Runs every single-matrix operator on `nm` and compares with the oracle.
pub fn check_operators(nm: &NormalizedMatrix, rng: &mut impl Rng) -> OracleReport {
    let mut report = OracleReport::default();
    let mut c = OpCounter::new();
    let t = to_na(&nm.materialize());
    let (n, d) = (t.nrows(), t.ncols());
    let tol = OPERATOR_TOLERANCE;

    for (op, x) in scalar_cases(rng) {
        let got = rewrite::scalar_op(nm, x, op, &mut c).unwrap().materialize();
        if op == ScalarOp::RevDiv {
            // x / 0 on both sides gives ±inf; compare only finite entries
            let want = t.map(|v| op.apply(v, x));
            let mask = |m: &DMatrix<f64>| m.map(|v| if v.is_finite() { v } else { 0.0 });
            report.record("scalar_op", &from_na(&mask(&to_na(&got))), &mask(&want), tol);
        } else {
            report.record("scalar_op", &got, &t.map(|v| op.apply(v, x)), tol);
        }
    }
    let got = rewrite::scalar_fn(nm, f64::exp, &mut c).unwrap().materialize();
    report.record("scalar_fn", &got, &t.map(f64::exp), tol);

    report.record(
        "row_sums",
        &rewrite::row_sums(nm, &mut c),
        &DMatrix::from_column_slice(n, 1, t.column_sum().as_slice()),
        tol,
    );
    report.record(
        "col_sums",
        &rewrite::col_sums(nm, &mut c),
        &DMatrix::from_row_slice(1, d, t.row_sum().as_slice()),
        tol,
    );
    let total = DMatrix::from_element(1, 1, t.sum());
    let got: NumericMatrix = DenseMatrix::filled(1, 1, rewrite::sum_all(nm, &mut c)).into();
    report.record("sum", &got, &total, tol);

    let x: NumericMatrix = random_table(rng, d, 3, 0.3);
    report.record("lmm", &rewrite::lmm(nm, &x, &mut c).unwrap(), &(&t * to_na(&x)), tol);
    let x: NumericMatrix = random_table(rng, 2, n, 0.3);
    report.record("rmm", &rewrite::rmm(&x, nm, &mut c).unwrap(), &(to_na(&x) * &t), tol);
    let v: NumericMatrix = random_dense(rng, n, 2).into();
    report.record("tlmm", &rewrite::tlmm(nm, &v, &mut c).unwrap(), &(t.transpose() * to_na(&v)), tol);

    let cross = t.transpose() * &t;
    for method in [CrossprodMethod::Naive, CrossprodMethod::Efficient] {
        report.record("crossprod", &rewrite::crossprod(nm, method, &mut c).unwrap(), &cross, tol);
    }
    report.record("gram", &rewrite::gram_transposed(nm, &mut c).unwrap(), &(&t * t.transpose()), tol);
    report.record("ginv", &rewrite::ginv(nm, &mut c).unwrap(), &oracle_pinv(&t), GINV_TOLERANCE);

    let other: NumericMatrix = random_dense(rng, n, d).into();
    let cases: [ElementwiseCase; 2] = [(ElementwiseOp::Add, |a, b| a + b), (ElementwiseOp::Mul, |a, b| a * b)];
    for (op, f) in cases {
        let got = rewrite::elementwise_matrix_op(nm, &other, op, &mut c).unwrap();
        report.record("elementwise", &got, &t.zip_map(&to_na(&other), f), tol);
    }
    report
}

/// Random two-table PK-FK matrix with the given entity rows.
pub fn random_pkfk(rng: &mut impl Rng, n_s: usize, max_cols: usize) -> NormalizedMatrix {
    let n_r = rng.random_range(1..=n_s);
    let (d_s, d_r) = (rng.random_range(1..=max_cols), rng.random_range(1..=max_cols));
    let s = random_table(rng, n_s, d_s, 0.2);
    let r = random_table(rng, n_r, d_r, 0.2);
    let k = IndicatorMatrix::new(n_r, random_surjective_targets(rng, n_s, n_r)).unwrap();
    NormalizedMatrix::pkfk(s, k, r).unwrap()
}

/// DMM in all four transpose combinations plus the two Gram forms.
pub fn check_dmm(rng: &mut impl Rng, max_rows: usize, max_cols: usize) -> OracleReport {
    let mut report = OracleReport::default();
    let mut c = OpCounter::new();
    let n = rng.random_range(2..=max_rows);
    let a = random_pkfk(rng, n, max_cols);
    let b_same_rows = random_pkfk(rng, n, max_cols);
    let (ta, tb) = (to_na(&a.materialize()), to_na(&b_same_rows.materialize()));

    let got = rewrite::dmm(&a.transpose(), &b_same_rows, &mut c).unwrap();
    report.record("dmm", &got, &(ta.transpose() * &tb), OPERATOR_TOLERANCE);
    let got = rewrite::dmm_gram(&a, &b_same_rows, GramForm::AtB, &mut c).unwrap();
    report.record("dmm", &got, &(ta.transpose() * &tb), OPERATOR_TOLERANCE);

    // A Bᵀ needs equal widths (a PK-FK matrix has at least two columns)
    let b_same_cols = random_pkfk_with_width(rng, a.ncols(), max_rows);
    let tbc = to_na(&b_same_cols.materialize());
    let got = rewrite::dmm(&a, &b_same_cols.transpose(), &mut c).unwrap();
    report.record("dmm", &got, &(&ta * tbc.transpose()), OPERATOR_TOLERANCE);
    let got = rewrite::dmm_gram(&a, &b_same_cols, GramForm::ABt, &mut c).unwrap();
    report.record("dmm", &got, &(&ta * tbc.transpose()), OPERATOR_TOLERANCE);

    // A B needs B with as many rows as A has columns
    {
        let b_chain = random_pkfk(rng, a.ncols(), max_cols);
        let tbb = to_na(&b_chain.materialize());
        let got = rewrite::dmm(&a, &b_chain, &mut c).unwrap();
        report.record("dmm", &got, &(&ta * &tbb), OPERATOR_TOLERANCE);
        let got = rewrite::dmm(&b_chain.transpose(), &a.transpose(), &mut c).unwrap();
        report.record("dmm", &got, &(tbb.transpose() * ta.transpose()), OPERATOR_TOLERANCE);
    }
    report
}

/// Random two-table PK-FK matrix with exactly `width ≥ 2` columns.
pub fn random_pkfk_with_width(rng: &mut impl Rng, width: usize, max_rows: usize) -> NormalizedMatrix {
    let n_s = rng.random_range(2..=max_rows);
    let n_r = rng.random_range(1..=n_s);
    let d_s = rng.random_range(1..width);
    let s = random_table(rng, n_s, d_s, 0.2);
    let r = random_table(rng, n_r, width - d_s, 0.2);
    let k = IndicatorMatrix::new(n_r, random_surjective_targets(rng, n_s, n_r)).unwrap();
    NormalizedMatrix::pkfk(s, k, r).unwrap()
}
