use alloc::vec::Vec;

use super::{JoinKind, NormalizedMatrix};

/// Dimensions of the base tables and the redundancy ratios derived from them.
///
/// For multi-table joins `n_r`/`d_r` list every attribute table; the
/// aggregate tuple ratio is `n_s / max(n_r)` and the feature ratio
/// `sum(d_r) / d_s`. A zero-width entity table gives an infinite feature
/// ratio. For a join without an entity table (multi-table M:N), `n_s` is
/// the join output size and `d_s` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeStats {
    pub kind: JoinKind,
    pub n_s: usize,
    pub n_r: Vec<usize>,
    pub d_s: usize,
    pub d_r: Vec<usize>,
    /// Rows of the untransposed join output (`n_s` for PK-FK and star joins).
    pub join_rows: usize,
    pub tuple_ratio: f64,
    pub feature_ratio: f64,
    pub logical_rows: usize,
    pub logical_cols: usize,
}

impl ShapeStats {
    /// Statistics of a two-table PK-FK join given only its dimensions.
    pub fn from_dims(n_s: usize, n_r: usize, d_s: usize, d_r: usize) -> ShapeStats {
        Self::assemble(JoinKind::PkFk, n_s, alloc::vec![n_r], d_s, alloc::vec![d_r], n_s, false)
    }

    fn assemble(
        kind: JoinKind,
        n_s: usize,
        n_r: Vec<usize>,
        d_s: usize,
        d_r: Vec<usize>,
        join_rows: usize,
        transposed: bool,
    ) -> ShapeStats {
        let max_nr = n_r.iter().copied().max().unwrap_or(0);
        let sum_dr: usize = d_r.iter().sum();
        let tuple_ratio = ratio(n_s, max_nr);
        let feature_ratio = ratio(sum_dr, d_s);
        let cols = d_s + sum_dr;
        let (logical_rows, logical_cols) = if transposed { (cols, join_rows) } else { (join_rows, cols) };
        ShapeStats { kind, n_s, n_r, d_s, d_r, join_rows, tuple_ratio, feature_ratio, logical_rows, logical_cols }
    }

    pub fn n_r_total(&self) -> usize {
        self.n_r.iter().sum()
    }

    pub fn d_r_total(&self) -> usize {
        self.d_r.iter().sum()
    }

    /// Columns of the untransposed join output.
    pub fn d(&self) -> usize {
        self.d_s + self.d_r_total()
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        f64::INFINITY
    } else {
        num as f64 / den as f64
    }
}

impl NormalizedMatrix {
    /// Base-table dimensions, tuple ratio and feature ratio.
    pub fn stats(&self) -> ShapeStats {
        let n = self.base_rows();
        let (n_s, d_s) = match self.entity() {
            Some(s) => (s.rows(), s.cols()),
            None => (n, 0),
        };
        let (n_r, d_r) = self.attributes().map(|(_, r)| (r.rows(), r.cols())).unzip();
        ShapeStats::assemble(self.kind(), n_s, n_r, d_s, d_r, n, self.is_transposed())
    }
}
