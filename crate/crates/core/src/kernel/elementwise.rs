//! Element-wise scalar and matrix-matrix arithmetic.

use core::str::FromStr;

use alloc::string::ToString;

use num_traits::Float;

use super::{DenseMatrix, NumericMatrix, OpCounter};
use crate::{Error, Result};

/// Arithmetic between a matrix `T` and a scalar `x`.
///
/// The `Rev*` forms put the scalar on the left (`x - T`, `x / T`, `x ^ T`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    RevSub,
    RevDiv,
    RevPow,
}

impl ScalarOp {
    /// The value of `t ⊘ x` (or `x ⊘ t` for the reversed forms).
    #[inline]
    pub fn apply(self, t: f64, x: f64) -> f64 {
        match self {
            ScalarOp::Add => t + x,
            ScalarOp::Sub => t - x,
            ScalarOp::Mul => t * x,
            ScalarOp::Div => t / x,
            ScalarOp::Pow => Float::powf(t, x),
            ScalarOp::RevSub => x - t,
            ScalarOp::RevDiv => x / t,
            ScalarOp::RevPow => Float::powf(x, t),
        }
    }

    /// Whether the operation counts as an addition rather than a multiply.
    pub fn is_additive(self) -> bool {
        matches!(self, ScalarOp::Add | ScalarOp::Sub | ScalarOp::RevSub)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ScalarOp::Add => "add",
            ScalarOp::Sub => "sub",
            ScalarOp::Mul => "mul",
            ScalarOp::Div => "div",
            ScalarOp::Pow => "pow",
            ScalarOp::RevSub => "rsub",
            ScalarOp::RevDiv => "rdiv",
            ScalarOp::RevPow => "rpow",
        }
    }

    /// Rejects division by a zero scalar.
    pub fn check(self, x: f64) -> Result<()> {
        if self == ScalarOp::Div && x == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(())
        }
    }
}

impl FromStr for ScalarOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "add" | "+" => ScalarOp::Add,
            "sub" | "-" => ScalarOp::Sub,
            "mul" | "*" => ScalarOp::Mul,
            "div" | "/" => ScalarOp::Div,
            "pow" | "^" => ScalarOp::Pow,
            "rsub" => ScalarOp::RevSub,
            "rdiv" => ScalarOp::RevDiv,
            "rpow" => ScalarOp::RevPow,
            other => return Err(Error::UnknownOperator(other.to_string())),
        })
    }
}

/// Element-wise arithmetic between two equally shaped matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementwiseOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ElementwiseOp {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ElementwiseOp::Add => a + b,
            ElementwiseOp::Sub => a - b,
            ElementwiseOp::Mul => a * b,
            ElementwiseOp::Div => a / b,
        }
    }
}

/// `m ⊘ x` on a regular matrix. One operation is counted per stored entry
/// (as an addition for additive operators, a multiply otherwise).
pub fn scalar_op(m: &NumericMatrix, x: f64, op: ScalarOp, counter: &mut OpCounter) -> Result<NumericMatrix> {
    op.check(x)?;
    let mut local = OpCounter::new();
    let out = m.map_elements(|t| op.apply(t, x), &mut local);
    if op.is_additive() {
        counter.add(local.multiplies as usize);
    } else {
        *counter += local;
    }
    Ok(out)
}

/// `a ⊘ b` element-wise; the result is dense.
pub fn elementwise(
    a: &NumericMatrix,
    b: &NumericMatrix,
    op: ElementwiseOp,
    counter: &mut OpCounter,
) -> Result<DenseMatrix> {
    if a.shape() != b.shape() {
        return Err(Error::shape("elementwise", a.shape(), b.shape()));
    }
    let cells = a.rows() * a.cols();
    match op {
        ElementwiseOp::Add | ElementwiseOp::Sub => counter.add(cells),
        ElementwiseOp::Mul | ElementwiseOp::Div => counter.mul(cells),
    }
    a.to_dense().zip_map(&b.to_dense(), |x, y| op.apply(x, y))
}
