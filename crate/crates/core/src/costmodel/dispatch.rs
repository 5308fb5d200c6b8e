use num_traits::Float;

use super::{decide, Decision, DecisionThresholds};
use crate::kernel::{self, elementwise, DenseMatrix, NumericMatrix, OpCounter, ScalarOp};
use crate::normmat::{NormalizedMatrix, ShapeStats};
use crate::rewrite::{self, CrossprodMethod};
use crate::Result;

/// Named element-wise functions usable in operator requests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarFunction {
    Exp,
    Ln,
    Square,
    Sqrt,
    Abs,
    Sigmoid,
}

impl ScalarFunction {
    #[inline]
    pub fn apply(self, v: f64) -> f64 {
        match self {
            ScalarFunction::Exp => Float::exp(v),
            ScalarFunction::Ln => Float::ln(v),
            ScalarFunction::Square => v * v,
            ScalarFunction::Sqrt => Float::sqrt(v),
            ScalarFunction::Abs => Float::abs(v),
            ScalarFunction::Sigmoid => 1.0 / (1.0 + Float::exp(-v)),
        }
    }
}

/// One operator invocation on a data matrix `T`.
#[derive(Debug, Clone, PartialEq)]
pub enum OpRequest {
    Scalar {
        op: ScalarOp,
        x: f64,
    },
    Function(ScalarFunction),
    RowSums,
    ColSums,
    Sum,
    /// `T · X`
    Lmm(NumericMatrix),
    /// `X · T`
    Rmm(NumericMatrix),
    /// `TᵀT`
    Crossprod(CrossprodMethod),
    /// `T Tᵀ`
    Gram,
    Ginv,
}

/// Result of an [`OpRequest`].
#[derive(Debug, Clone)]
pub enum OpResult {
    Matrix(NumericMatrix),
    Normalized(NormalizedMatrix),
    Scalar(f64),
}

impl OpResult {
    /// The value as a regular matrix (`1 × 1` for scalars).
    pub fn to_matrix(&self) -> NumericMatrix {
        match self {
            OpResult::Matrix(m) => m.clone(),
            OpResult::Normalized(nm) => nm.materialize(),
            OpResult::Scalar(v) => DenseMatrix::filled(1, 1, *v).into(),
        }
    }
}

/// Runs `req` through the factorized rewrites.
pub fn execute_factorized(nm: &NormalizedMatrix, req: &OpRequest, counter: &mut OpCounter) -> Result<OpResult> {
    Ok(match req {
        OpRequest::Scalar { op, x } => OpResult::Normalized(rewrite::scalar_op(nm, *x, *op, counter)?),
        OpRequest::Function(f) => OpResult::Normalized(rewrite::scalar_fn(nm, |v| f.apply(v), counter)?),
        OpRequest::RowSums => OpResult::Matrix(rewrite::row_sums(nm, counter)),
        OpRequest::ColSums => OpResult::Matrix(rewrite::col_sums(nm, counter)),
        OpRequest::Sum => OpResult::Scalar(rewrite::sum_all(nm, counter)),
        OpRequest::Lmm(x) => OpResult::Matrix(rewrite::lmm(nm, x, counter)?),
        OpRequest::Rmm(x) => OpResult::Matrix(rewrite::rmm(x, nm, counter)?),
        OpRequest::Crossprod(method) => OpResult::Matrix(rewrite::crossprod(nm, *method, counter)?),
        OpRequest::Gram => OpResult::Matrix(rewrite::gram_transposed(nm, counter)?),
        OpRequest::Ginv => OpResult::Matrix(rewrite::ginv(nm, counter)?),
    })
}

/// Pseudo-inverse of a regular matrix through its smaller Gram matrix,
/// mirroring the factorized formula with standard kernels.
pub fn ginv_standard(t: &NumericMatrix, counter: &mut OpCounter) -> Result<NumericMatrix> {
    let (n, d) = t.shape();
    if d < n {
        let p = kernel::pinv_gram(&kernel::crossprod(t, counter), n)?;
        Ok(kernel::matmul(t, &p.transpose().into(), counter)?.transpose())
    } else {
        let p = kernel::pinv_gram(&kernel::tcrossprod(t, counter), d)?;
        kernel::tmatmul(t, &p.into(), counter)
    }
}

/// Runs `req` with standard kernels on a regular matrix.
pub fn execute_standard(t: &NumericMatrix, req: &OpRequest, counter: &mut OpCounter) -> Result<OpResult> {
    Ok(match req {
        OpRequest::Scalar { op, x } => OpResult::Matrix(elementwise::scalar_op(t, *x, *op, counter)?),
        OpRequest::Function(f) => OpResult::Matrix(t.map_elements(|v| f.apply(v), counter)),
        OpRequest::RowSums => OpResult::Matrix(DenseMatrix::column(t.row_sums(counter)).into()),
        OpRequest::ColSums => OpResult::Matrix(DenseMatrix::row_vector(t.col_sums(counter)).into()),
        OpRequest::Sum => OpResult::Scalar(t.sum(counter)),
        OpRequest::Lmm(x) => OpResult::Matrix(kernel::matmul(t, x, counter)?),
        OpRequest::Rmm(x) => OpResult::Matrix(kernel::matmul(x, t, counter)?),
        OpRequest::Crossprod(_) => OpResult::Matrix(kernel::crossprod(t, counter).into()),
        OpRequest::Gram => OpResult::Matrix(kernel::tcrossprod(t, counter).into()),
        OpRequest::Ginv => OpResult::Matrix(ginv_standard(t, counter)?),
    })
}

#[derive(Debug, Clone)]
enum Repr {
    Factorized(NormalizedMatrix),
    Materialized(NumericMatrix),
}

/// A normalized matrix bound to an execution strategy.
///
/// The strategy is decided once at construction. A materialized verdict
/// materializes the join once and routes every later operator to the
/// standard kernels.
#[derive(Debug, Clone)]
pub struct AutoMatrix {
    stats: ShapeStats,
    decision: Decision,
    repr: Repr,
}

impl AutoMatrix {
    /// Applies the decision rule to `nm`.
    pub fn new(nm: NormalizedMatrix, thresholds: DecisionThresholds) -> Self {
        let decision = decide(&nm.stats(), thresholds);
        Self::with_decision(nm, decision)
    }

    /// Uses a fixed strategy regardless of the data statistics.
    pub fn with_decision(nm: NormalizedMatrix, decision: Decision) -> Self {
        let stats = nm.stats();
        let repr = match decision {
            Decision::Factorized => Repr::Factorized(nm),
            Decision::Materialized => Repr::Materialized(nm.materialize()),
        };
        AutoMatrix { stats, decision, repr }
    }

    pub fn decision(&self) -> Decision {
        self.decision
    }

    pub fn stats(&self) -> &ShapeStats {
        &self.stats
    }

    pub fn as_normalized(&self) -> Option<&NormalizedMatrix> {
        match &self.repr {
            Repr::Factorized(nm) => Some(nm),
            Repr::Materialized(_) => None,
        }
    }

    pub fn as_materialized(&self) -> Option<&NumericMatrix> {
        match &self.repr {
            Repr::Materialized(t) => Some(t),
            Repr::Factorized(_) => None,
        }
    }

    /// Runs `req` on the chosen path.
    pub fn execute(&self, req: &OpRequest, counter: &mut OpCounter) -> Result<OpResult> {
        match &self.repr {
            Repr::Factorized(nm) => execute_factorized(nm, req, counter),
            Repr::Materialized(t) => execute_standard(t, req, counter),
        }
    }

    pub(crate) fn view(&self) -> AutoView<'_> {
        match &self.repr {
            Repr::Factorized(nm) => AutoView::Factorized(nm),
            Repr::Materialized(t) => AutoView::Materialized(t),
        }
    }

    /// Same strategy and statistics, new data (e.g. after a scalar operator).
    pub(crate) fn replace_data(&self, data: AutoData) -> AutoMatrix {
        let repr = match data {
            AutoData::Factorized(nm) => Repr::Factorized(nm),
            AutoData::Materialized(t) => Repr::Materialized(t),
        };
        AutoMatrix { stats: self.stats.clone(), decision: self.decision, repr }
    }
}

pub(crate) enum AutoView<'a> {
    Factorized(&'a NormalizedMatrix),
    Materialized(&'a NumericMatrix),
}

pub(crate) enum AutoData {
    Factorized(NormalizedMatrix),
    Materialized(NumericMatrix),
}
