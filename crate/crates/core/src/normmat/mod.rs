//! The normalized matrix: base tables plus indicator matrices standing in
//! for a join result, in PK-FK, star, M:N and multi-table M:N forms.

mod build;
mod indicator;
mod matrix;
mod stats;
pub mod synth;

pub use build::{build_mn, build_multi_mn, build_pkfk, build_star};
pub use indicator::IndicatorMatrix;
pub use matrix::{Block, JoinKind, NormalizedMatrix};
pub use stats::ShapeStats;
