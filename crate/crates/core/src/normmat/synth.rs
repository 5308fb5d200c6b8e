//! Seeded random normalized matrices for property tests and benchmarks.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{build_mn, IndicatorMatrix, JoinKind, NormalizedMatrix};
use crate::kernel::{CsrMatrix, DenseMatrix, NumericMatrix};

/// Size limits for [`random_normalized`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomShape {
    /// Upper bound on the entity-table rows (and on the output rows of a
    /// multi-table M:N join).
    pub max_rows: usize,
    /// Upper bound on the width of every base table.
    pub max_cols: usize,
    /// Upper bound on the number of attribute tables of a star join.
    pub max_tables: usize,
    /// Probability that a base table is stored as CSR.
    pub sparse_probability: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape { max_rows: 64, max_cols: 6, max_tables: 3, sparse_probability: 0.25 }
    }
}

/// Uniform `[-1, 1)` dense matrix.
pub fn random_dense<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseMatrix::from_vec(rows, cols, data).expect("length matches shape")
}

/// Base table of the given shape, dense or (with about 30% fill) CSR.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sparse_probability: f64) -> NumericMatrix {
    if rng.random_bool(sparse_probability) {
        let mut triplets = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.random_bool(0.3) {
                    triplets.push((r, c, rng.random_range(-1.0..1.0)));
                }
            }
        }
        CsrMatrix::from_triplets(rows, cols, triplets).expect("triplets are in range").into()
    } else {
        random_dense(rng, rows, cols).into()
    }
}

/// `rows` targets in `0..cols` hitting every column at least once
/// (`rows ≥ cols`), in random order.
pub fn random_surjective_targets<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<usize> {
    assert!(rows >= cols && cols > 0, "a surjective map needs 0 < cols <= rows");
    let mut target: Vec<usize> = (0..cols).chain((cols..rows).map(|_| rng.random_range(0..cols))).collect();
    target.shuffle(rng);
    target
}

/// A random normalized matrix of the given join kind.
///
/// Attribute tables of PK-FK and star joins have at most as many rows as the
/// entity table. M:N joins draw join-attribute values from a small domain so
/// every value repeats; the output size is then capped by dropping excess
/// entity rows.
pub fn random_normalized<R: Rng + ?Sized>(rng: &mut R, kind: JoinKind, shape: RandomShape) -> NormalizedMatrix {
    let width = |rng: &mut R| rng.random_range(1..=shape.max_cols.max(1));
    let table = |rng: &mut R, rows: usize, cols: usize| random_table(rng, rows, cols, shape.sparse_probability);
    match kind {
        JoinKind::PkFk | JoinKind::Star => {
            let n_s = rng.random_range(2..=shape.max_rows.max(2));
            let q = if kind == JoinKind::PkFk { 1 } else { rng.random_range(1..=shape.max_tables.max(1)) };
            let d_s = width(rng);
            let s = table(rng, n_s, d_s);
            let parts = (0..q)
                .map(|_| {
                    let n_r = rng.random_range(1..=n_s);
                    let d_r = width(rng);
                    let k = IndicatorMatrix::new(n_r, random_surjective_targets(rng, n_s, n_r)).expect("surjective");
                    (k, table(rng, n_r, d_r))
                })
                .collect::<Vec<_>>();
            if kind == JoinKind::PkFk {
                let (k, r) = parts.into_iter().next().expect("one part");
                NormalizedMatrix::pkfk(s, k, r).expect("consistent shapes")
            } else {
                NormalizedMatrix::star(s, parts).expect("consistent shapes")
            }
        }
        JoinKind::ManyToMany => loop {
            // keep |join| = Σ_v count_S(v) count_R(v) within max_rows² / 4
            let side = (shape.max_rows / 4).max(2);
            let n_s = rng.random_range(1..=side);
            let n_r = rng.random_range(1..=side);
            let domain = rng.random_range(1..=n_s.min(n_r));
            let j_s: Vec<usize> = (0..n_s).map(|_| rng.random_range(0..domain)).collect();
            let j_r: Vec<usize> = (0..n_r).map(|_| rng.random_range(0..domain)).collect();
            let (d_s, d_r) = (width(rng), width(rng));
            let s = table(rng, n_s, d_s);
            let r = table(rng, n_r, d_r);
            if let Ok(nm) = build_mn(s, &j_s, r, &j_r) {
                return nm;
            }
        },
        JoinKind::MultiManyToMany => {
            let n = rng.random_range(2..=shape.max_rows.max(2));
            let q = rng.random_range(2..=shape.max_tables.max(2));
            let parts = (0..q)
                .map(|_| {
                    let rows = rng.random_range(1..=n);
                    let cols = width(rng);
                    let i = IndicatorMatrix::new(rows, random_surjective_targets(rng, n, rows)).expect("surjective");
                    (i, table(rng, rows, cols))
                })
                .collect();
            NormalizedMatrix::multi_mn(parts).expect("consistent shapes")
        }
    }
}
