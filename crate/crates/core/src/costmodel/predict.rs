use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::normmat::ShapeStats;
use crate::{Error, Result};

/// Operators with closed-form arithmetic-count predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorId {
    ScalarMult,
    ScalarAdd,
    ScalarFn,
    RowSums,
    ColSums,
    Sum,
    Lmm,
    Rmm,
    Crossprod,
    Ginv,
}

impl OperatorId {
    pub const ALL: [OperatorId; 10] = [
        OperatorId::ScalarMult,
        OperatorId::ScalarAdd,
        OperatorId::ScalarFn,
        OperatorId::RowSums,
        OperatorId::ColSums,
        OperatorId::Sum,
        OperatorId::Lmm,
        OperatorId::Rmm,
        OperatorId::Crossprod,
        OperatorId::Ginv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorId::ScalarMult => "scalar_mult",
            OperatorId::ScalarAdd => "scalar_add",
            OperatorId::ScalarFn => "scalar_fn",
            OperatorId::RowSums => "row_sums",
            OperatorId::ColSums => "col_sums",
            OperatorId::Sum => "sum",
            OperatorId::Lmm => "lmm",
            OperatorId::Rmm => "rmm",
            OperatorId::Crossprod => "crossprod",
            OperatorId::Ginv => "ginv",
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorId::ALL.into_iter().find(|op| op.as_str() == s).ok_or_else(|| Error::UnknownOperator(s.to_string()))
    }
}

/// Extra operand dimensions: columns of `X` for LMM, rows of `X` for RMM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtraDims {
    pub d_x: usize,
    pub n_x: usize,
}

impl Default for ExtraDims {
    fn default() -> Self {
        ExtraDims { d_x: 1, n_x: 1 }
    }
}

/// Predicted arithmetic counts of the standard (materialized) and factorized
/// executions of one operator. Lower-order terms are ignored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountPrediction {
    pub op: OperatorId,
    pub standard: f64,
    pub factorized: f64,
    pub predicted_speedup: f64,
}

/// Evaluates the closed-form count expressions for `op`.
///
/// With `n` output rows, `d = d_S + Σ d_Ri`, and `F = n_S d_S + Σ n_Ri d_Ri`
/// (the total size of the base tables):
///
/// | operator          | standard                  | factorized |
/// |-------------------|---------------------------|------------|
/// | scalar, aggregate | `n d`                     | `F` |
/// | LMM / RMM         | `d_X n d` / `n_X n d`     | `d_X F` / `n_X F` |
/// | crossprod         | `½ d² n`                  | `½ d_S² n_S + Σ ½ d_Ri² n_Ri + Σ_{i>j} d_i d_j n_i` |
/// | ginv (`n > d`)    | `7 n d² + 20 d³`          | `27 d³ + crossprod + d F` |
/// | ginv (`n ≤ d`)    | `7 n² d + 20 n³`          | `27 n³ + ½ n_S² d_S + Σ ½ n_Ri² d_Ri + n F` |
///
/// The cross term `d_i d_j n_i` pairs every attribute block `i` with each
/// block before it (for a PK-FK join it is `d_S d_R n_R`).
pub fn predict_counts(op: OperatorId, stats: &ShapeStats, extra: ExtraDims) -> Result<CountPrediction> {
    let n = stats.join_rows as f64;
    let d = stats.d() as f64;
    if stats.join_rows == 0 || stats.d() == 0 {
        return Err(Error::InvalidConfig("count prediction needs positive dimensions".into()));
    }
    // (rows, width) of every base table, entity first
    let tables = || {
        core::iter::once((stats.n_s as f64, stats.d_s as f64))
            .chain(stats.n_r.iter().zip(&stats.d_r).map(|(&n, &d)| (n as f64, d as f64)))
    };
    let base: f64 = tables().map(|(n, d)| n * d).sum();
    let crossprod_fact = || {
        let mut total = 0.0;
        let mut prev_width = 0.0;
        for (rows, width) in tables() {
            total += 0.5 * width * width * rows + width * prev_width * rows;
            prev_width += width;
        }
        total
    };
    let (standard, factorized) = match op {
        OperatorId::ScalarMult
        | OperatorId::ScalarAdd
        | OperatorId::ScalarFn
        | OperatorId::RowSums
        | OperatorId::ColSums
        | OperatorId::Sum => (n * d, base),
        OperatorId::Lmm => {
            let dx = extra.d_x as f64;
            (dx * n * d, dx * base)
        }
        OperatorId::Rmm => {
            let nx = extra.n_x as f64;
            (nx * n * d, nx * base)
        }
        OperatorId::Crossprod => (0.5 * d * d * n, crossprod_fact()),
        OperatorId::Ginv if d < n => {
            (7.0 * n * d * d + 20.0 * d * d * d, 27.0 * d * d * d + crossprod_fact() + d * base)
        }
        OperatorId::Ginv => {
            let gram: f64 = tables().map(|(rows, width)| 0.5 * rows * rows * width).sum();
            (7.0 * n * n * d + 20.0 * n * n * n, 27.0 * n * n * n + gram + n * base)
        }
    };
    Ok(CountPrediction { op, standard, factorized, predicted_speedup: standard / factorized })
}
