//! Arithmetic-count predictions, the factorize-or-materialize decision rule
//! and strategy-bound execution.

mod decide;
mod dispatch;
mod predict;

pub use decide::{decide, Decision, DecisionThresholds, MANY_TO_MANY_MARGIN};
pub use dispatch::{
    execute_factorized, execute_standard, ginv_standard, AutoMatrix, OpRequest, OpResult, ScalarFunction,
};
pub(crate) use dispatch::{AutoData, AutoView};
pub use predict::{predict_counts, CountPrediction, ExtraDims, OperatorId};
