use core::fmt;

use alloc::format;

use crate::normmat::{JoinKind, ShapeStats};
use crate::{Error, Result};

/// Cutoffs of the factorize-or-materialize rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionThresholds {
    /// Tuple-ratio cutoff: below it the join is materialized.
    pub tau: f64,
    /// Feature-ratio cutoff: below it the join is materialized.
    pub rho: f64,
}

impl Default for DecisionThresholds {
    fn default() -> Self {
        DecisionThresholds { tau: 5.0, rho: 1.0 }
    }
}

impl DecisionThresholds {
    /// Thresholds must be non-negative; zero disables the corresponding test.
    pub fn new(tau: f64, rho: f64) -> Result<Self> {
        if tau.is_nan() || rho.is_nan() || tau < 0.0 || rho < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "thresholds must be non-negative numbers, got tau={tau}, rho={rho}"
            )));
        }
        Ok(DecisionThresholds { tau, rho })
    }
}

/// Execution strategy for a normalized matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Factorized,
    Materialized,
}

impl Decision {
    pub fn as_str(self) -> &'static str {
        match self {
            Decision::Factorized => "factorized",
            Decision::Materialized => "materialized",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Margin by which the factorized count of an M:N join must beat the
/// standard count before factorizing.
pub const MANY_TO_MANY_MARGIN: f64 = 1.25;

/// Chooses between factorized and materialized execution.
///
/// PK-FK and star joins are materialized iff `TR < tau` or `FR < rho`.
/// M:N joins, for which tuple and feature ratios are not meaningful, compare
/// the predicted arithmetic of one left multiplication instead (including
/// the indicator gathers, which scale with the join size): factorize iff
/// `MANY_TO_MANY_MARGIN × factorized < standard`.
pub fn decide(stats: &ShapeStats, thresholds: DecisionThresholds) -> Decision {
    match stats.kind {
        JoinKind::PkFk | JoinKind::Star => {
            if stats.tuple_ratio < thresholds.tau || stats.feature_ratio < thresholds.rho {
                Decision::Materialized
            } else {
                Decision::Factorized
            }
        }
        JoinKind::ManyToMany | JoinKind::MultiManyToMany => {
            let n = stats.join_rows as f64;
            let standard = n * stats.d() as f64;
            let tables = (stats.n_s * stats.d_s) as f64
                + stats.n_r.iter().zip(&stats.d_r).map(|(&r, &d)| (r * d) as f64).sum::<f64>();
            let gathers = n * (stats.n_r.len() + usize::from(stats.kind == JoinKind::ManyToMany)) as f64;
            if MANY_TO_MANY_MARGIN * (tables + gathers) < standard {
                Decision::Factorized
            } else {
                Decision::Materialized
            }
        }
    }
}
