use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::kernel::{self, DenseMatrix, NumericMatrix, OpCounter};
use crate::normmat::{build_mn, build_pkfk, build_star, IndicatorMatrix, NormalizedMatrix};
use crate::Error;

fn m(rows: &[&[f64]]) -> NumericMatrix {
    NumericMatrix::from_rows(rows).unwrap()
}

fn f1() -> NormalizedMatrix {
    build_pkfk(m(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]), &[1, 2, 1], m(&[&[10.0, 20.0], &[30.0, 40.0]])).unwrap()
}

fn f2() -> NormalizedMatrix {
    build_mn(m(&[&[1.0], &[2.0]]), &[7, 8], m(&[&[10.0], &[20.0], &[30.0]]), &[8, 7, 7]).unwrap()
}

fn f3() -> NormalizedMatrix {
    build_star(
        m(&[&[1.0], &[2.0], &[3.0]]),
        vec![(&[1usize, 2, 1][..], m(&[&[10.0], &[20.0]])), (&[2usize, 1, 2][..], m(&[&[100.0], &[200.0]]))],
    )
    .unwrap()
}

fn c() -> OpCounter {
    OpCounter::new()
}

fn col(v: &[f64]) -> NumericMatrix {
    DenseMatrix::column(v.to_vec()).into()
}

fn max_diff(a: &NumericMatrix, b: &NumericMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (a, b) = (a.to_dense(), b.to_dense());
    a.data().iter().zip(b.data()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn scalar_op_examples() {
    let doubled = scalar_op(&f1(), 2.0, ScalarOp::Mul, &mut c()).unwrap();
    assert_eq!(
        doubled.materialize(),
        m(&[&[2.0, 4.0, 20.0, 40.0], &[6.0, 8.0, 60.0, 80.0], &[10.0, 12.0, 20.0, 40.0]])
    );
    assert_eq!(scalar_op(&f1(), 1.0, ScalarOp::Mul, &mut c()).unwrap().materialize(), f1().materialize());
    assert_eq!(scalar_op(&f1(), 0.0, ScalarOp::Add, &mut c()).unwrap().materialize(), f1().materialize());
    assert_eq!(scalar_op(&f1(), 0.0, ScalarOp::Div, &mut c()).unwrap_err(), Error::DivisionByZero);
    let t = scalar_op(&f1().transpose(), 3.0, ScalarOp::RevSub, &mut c()).unwrap();
    assert!(t.is_transposed());
    assert_eq!(t.materialize(), f1().materialize().transpose().map_elements(|v| 3.0 - v, &mut c()));
}

#[test]
fn scalar_fn_examples() {
    let sq = scalar_fn(&f1(), |v| v * v, &mut c()).unwrap().materialize();
    assert_eq!(sq.to_dense().row(0), &[1.0, 4.0, 100.0, 400.0]);
    assert_eq!(scalar_fn(&f1(), |v| v, &mut c()).unwrap().materialize(), f1().materialize());
    let zero = NormalizedMatrix::pkfk(
        NumericMatrix::zeros(3, 2),
        IndicatorMatrix::new(2, vec![0, 1, 0]).unwrap(),
        NumericMatrix::zeros(2, 2),
    )
    .unwrap();
    let e = scalar_fn(&zero, f64::exp, &mut c()).unwrap().materialize();
    assert_eq!(e.to_dense(), DenseMatrix::ones(3, 4));
}

#[test]
fn aggregation_examples() {
    assert_eq!(row_sums(&f1(), &mut c()), col(&[33.0, 77.0, 41.0]));
    assert_eq!(row_sums(&f2(), &mut c()), col(&[21.0, 31.0, 12.0]));
    assert_eq!(row_sums(&f3(), &mut c()), col(&[211.0, 122.0, 213.0]));

    let row = |v: &[f64]| NumericMatrix::from(DenseMatrix::row_vector(v.to_vec()));
    assert_eq!(col_sums(&f1(), &mut c()), row(&[9.0, 12.0, 50.0, 80.0]));
    assert_eq!(col_sums(&f2(), &mut c()), row(&[4.0, 60.0]));
    assert_eq!(col_sums(&f3(), &mut c()), row(&[6.0, 40.0, 500.0]));

    assert_eq!(sum_all(&f1(), &mut c()), 151.0);
    assert_eq!(sum_all(&f3(), &mut c()), 546.0);
    assert_eq!(sum_all(&f1().transpose(), &mut c()), 151.0);
    let zero = scalar_op(&f1(), 0.0, ScalarOp::Mul, &mut c()).unwrap();
    assert_eq!(sum_all(&zero, &mut c()), 0.0);

    // transposed: rowSums(Tᵀ) = colSums(T)ᵀ
    assert_eq!(row_sums(&f1().transpose(), &mut c()), col(&[9.0, 12.0, 50.0, 80.0]));
}

#[test]
fn lmm_examples() {
    assert_eq!(lmm(&f1(), &col(&[1.0; 4]), &mut c()).unwrap(), col(&[33.0, 77.0, 41.0]));
    assert_eq!(lmm(&f1(), &col(&[1.0, 0.0, 0.0, 1.0]), &mut c()).unwrap(), col(&[21.0, 43.0, 25.0]));
    assert_eq!(lmm(&f1(), &NumericMatrix::zeros(4, 2), &mut c()).unwrap(), NumericMatrix::zeros(3, 2));
    let err = lmm(&f1(), &NumericMatrix::zeros(3, 1), &mut c()).unwrap_err();
    assert!(matches!(err, Error::Shape { op: "lmm", .. }));
}

#[test]
fn rmm_examples() {
    let x = |v: &[f64]| NumericMatrix::from(DenseMatrix::row_vector(v.to_vec()));
    assert_eq!(rmm(&x(&[1.0, 1.0, 1.0]), &f1(), &mut c()).unwrap(), x(&[9.0, 12.0, 50.0, 80.0]));
    assert_eq!(rmm(&x(&[1.0, 0.0, 0.0]), &f1(), &mut c()).unwrap(), x(&[1.0, 2.0, 10.0, 20.0]));
    assert_eq!(rmm(&x(&[0.0, 1.0, -1.0]), &f1(), &mut c()).unwrap(), x(&[-2.0, -2.0, 20.0, 20.0]));
}

#[test]
fn crossprod_examples() {
    let expected = m(&[
        &[35.0, 44.0, 150.0, 240.0],
        &[44.0, 56.0, 200.0, 320.0],
        &[150.0, 200.0, 1100.0, 1600.0],
        &[240.0, 320.0, 1600.0, 2400.0],
    ]);
    for method in [CrossprodMethod::Efficient, CrossprodMethod::Naive] {
        let cp = crossprod(&f1(), method, &mut c()).unwrap();
        assert_eq!(cp, expected);
        assert!(cp.as_dense().unwrap().is_symmetric());
    }
    // zero-width entity table: only the attribute block remains
    let no_s = NormalizedMatrix::pkfk(
        NumericMatrix::zeros(3, 0),
        IndicatorMatrix::new(2, vec![0, 1, 0]).unwrap(),
        m(&[&[10.0, 20.0], &[30.0, 40.0]]),
    )
    .unwrap();
    assert_eq!(
        crossprod(&no_s, CrossprodMethod::Efficient, &mut c()).unwrap(),
        m(&[&[1100.0, 1600.0], &[1600.0, 2400.0]])
    );
}

#[test]
fn gram_examples() {
    let expected = m(&[&[505.0, 1111.0, 517.0], &[1111.0, 2525.0, 1139.0], &[517.0, 1139.0, 561.0]]);
    assert_eq!(gram_transposed(&f1(), &mut c()).unwrap(), expected);
    assert_eq!(crossprod(&f1().transpose(), CrossprodMethod::Efficient, &mut c()).unwrap(), expected);

    let single = build_pkfk(m(&[&[1.0, 2.0]]), &[1], m(&[&[3.0]])).unwrap();
    assert_eq!(gram_transposed(&single, &mut c()).unwrap(), m(&[&[14.0]]));
}

#[test]
fn ginv_examples() {
    let orth = build_pkfk(m(&[&[1.0, 0.0], &[0.0, 1.0]]), &[1, 1], m(&[&[0.0]])).unwrap();
    let g = ginv(&orth, &mut c()).unwrap();
    assert!(max_diff(&g, &m(&[&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]])) < 1e-12);

    let t = f1().materialize();
    let oracle = kernel::pinv_dense(&t).unwrap();
    let g = ginv(&f1(), &mut c()).unwrap();
    let scale = oracle.max_abs();
    assert!(max_diff(&g, &oracle) / scale < 1e-8);

    let gt = ginv(&f1().transpose(), &mut c()).unwrap();
    assert!(max_diff(&gt, &oracle.transpose()) / scale < 1e-8);
}

#[test]
fn dmm_examples() {
    let b = build_pkfk(m(&[&[1.0], &[0.0], &[0.0], &[0.0]]), &[1, 1, 1, 1], m(&[&[1.0]])).unwrap();
    let ab = dmm(&f1(), &b, &mut c()).unwrap();
    assert_eq!(ab, m(&[&[1.0, 33.0], &[3.0, 77.0], &[5.0, 41.0]]));

    let atb = dmm_gram(&f1(), &f1(), GramForm::AtB, &mut c()).unwrap();
    assert_eq!(atb, crossprod(&f1(), CrossprodMethod::Efficient, &mut c()).unwrap());
    let p = dmm_overlap(&f1(), &f1(), &mut c()).unwrap();
    assert_eq!(p.nnz(), 2);
    assert_eq!(p.to_dense().data(), &[2.0, 0.0, 0.0, 1.0]);

    let abt = dmm_gram(&f1(), &f1(), GramForm::ABt, &mut c()).unwrap();
    assert_eq!(abt, gram_transposed(&f1(), &mut c()).unwrap());
}

#[test]
fn dmm_split_cases() {
    // A has a wider entity table than B, so A·Bᵀ runs as (B·Aᵀ)ᵀ
    let a = build_pkfk(m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]), &[1, 2], m(&[&[7.0], &[8.0]])).unwrap();
    let b = build_pkfk(m(&[&[1.0], &[2.0], &[3.0]]), &[2, 1, 2], m(&[&[1.0, 0.5, -1.0], &[2.0, -3.0, 4.0]])).unwrap();
    let oracle = |x: &NumericMatrix, y: &NumericMatrix| kernel::matmul_t(x, y, &mut c()).unwrap();
    let ab_t = dmm_gram(&a, &b, GramForm::ABt, &mut c()).unwrap();
    assert_eq!(ab_t, oracle(&a.materialize(), &b.materialize()));
    let ba_t = dmm_gram(&b, &a, GramForm::ABt, &mut c()).unwrap();
    assert_eq!(ba_t, oracle(&b.materialize(), &a.materialize()));

    // (Aᵀ)(Bᵀ) = (BA)ᵀ with conformable shapes: A is 2x4, B must be 4-row... use Bᵀ·Aᵀ
    let bt = b.transpose(); // 4x3
    let at = a.transpose(); // 4x2
    let prod = dmm(&at.transpose(), &bt, &mut c()).unwrap(); // A (2x4) · Bᵀ (4x3)
    assert_eq!(prod, oracle(&a.materialize(), &b.materialize()));
}

#[test]
fn elementwise_matrix_examples() {
    let t = f1().materialize();
    let zeros = NumericMatrix::zeros(3, 4);
    assert_eq!(elementwise_matrix_op(&f1(), &zeros, ElementwiseOp::Add, &mut c()).unwrap(), t);
    let ones = NumericMatrix::Dense(DenseMatrix::ones(3, 4));
    assert_eq!(elementwise_matrix_op(&f1(), &ones, ElementwiseOp::Mul, &mut c()).unwrap(), t);
    let x: Vec<f64> = (0..12).map(|v| v as f64 * 0.5).collect();
    let x = NumericMatrix::Dense(DenseMatrix::from_vec(3, 4, x).unwrap());
    let sum = elementwise_matrix_op(&f1(), &x, ElementwiseOp::Add, &mut c()).unwrap();
    assert_eq!(sum.to_dense(), t.to_dense().add(&x.to_dense()).unwrap());
    assert!(elementwise_matrix_op(&f1(), &NumericMatrix::zeros(4, 3), ElementwiseOp::Add, &mut c()).is_err());
}

#[test]
fn factorized_counts_match_closed_forms() {
    // LMM with d_X = 1 on F1: factorized = n_S d_S + n_R d_R = 6 + 4
    let mut k = c();
    lmm(&f1(), &col(&[1.0; 4]), &mut k).unwrap();
    assert_eq!(k.multiplies, 10);
    let mut k = c();
    kernel::matmul(&f1().materialize(), &col(&[1.0; 4]), &mut k).unwrap();
    assert_eq!(k.multiplies, 12);
}
