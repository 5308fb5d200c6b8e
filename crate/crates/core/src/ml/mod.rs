//! Logistic regression, linear regression, K-Means and Gaussian NMF.
//!
//! Every algorithm is written once against [`DataMatrix`]. Passing a
//! [`NormalizedMatrix`] runs the factorized rewrites, passing a
//! [`NumericMatrix`] runs the standard kernels, and an
//! [`AutoMatrix`](crate::costmodel::AutoMatrix) runs whichever path the cost
//! model picked. The algorithm bodies are identical in all three cases.

mod data;
mod gnmf;
mod kmeans;
mod regression;

use alloc::format;
use alloc::vec::Vec;

use crate::kernel::{DenseMatrix, OpCounter};
use crate::{Error, Result};

pub use data::DataMatrix;
pub use gnmf::gnmf;
pub use kmeans::kmeans;
pub use regression::{linreg_gd, linreg_gd_from, linreg_normal, logistic_gd};

/// Denominator guard of the multiplicative GNMF updates.
pub const GNMF_EPSILON: f64 = 1e-12;

/// Hyper-parameters shared by the training algorithms.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Number of iterations; no early stopping.
    pub iterations: usize,
    /// Gradient step size `α` (gradient-descent algorithms only).
    pub step_size: f64,
    /// Number of centroids (K-Means).
    pub k: usize,
    /// Factorization rank (GNMF).
    pub rank: usize,
    /// Seed of the centroid sampling and factor initialization.
    pub seed: u64,
    /// Keep a copy of the model after every iteration in [`ModelOutput::states`].
    pub record_states: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { iterations: 20, step_size: 1e-3, k: 10, rank: 5, seed: 0, record_states: false }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(format!("{msg} ({self:?})")));
        if self.iterations == 0 {
            return fail("iterations must be at least 1");
        }
        if !(self.step_size >= 0.0 && self.step_size.is_finite()) {
            return fail("step size must be a finite non-negative number");
        }
        if self.k == 0 || self.rank == 0 {
            return fail("k and rank must be at least 1");
        }
        Ok(())
    }
}

/// Algorithm that produced a [`ModelOutput`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    LogisticRegression,
    LinearRegressionNormal,
    LinearRegressionGd,
    KMeans,
    Gnmf,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::LogisticRegression => "logreg",
            Algorithm::LinearRegressionNormal => "linreg",
            Algorithm::LinearRegressionGd => "linreg_gd",
            Algorithm::KMeans => "kmeans",
            Algorithm::Gnmf => "gnmf",
        }
    }
}

/// Learned parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// Regression weights, `d × 1`.
    Weights(DenseMatrix),
    /// Centroids as columns (`d × k`) and the row-to-cluster assignment.
    Clusters { centroids: DenseMatrix, assignment: Vec<usize> },
    /// `T ≈ W Hᵀ` with `W: n × r` and `H: d × r`.
    Factors { w: DenseMatrix, h: DenseMatrix },
}

impl Model {
    /// All parameter matrices, in a fixed order, for trace comparisons.
    pub fn matrices(&self) -> Vec<&DenseMatrix> {
        match self {
            Model::Weights(w) => alloc::vec![w],
            Model::Clusters { centroids, .. } => alloc::vec![centroids],
            Model::Factors { w, h } => alloc::vec![w, h],
        }
    }
}

/// Result of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutput {
    pub algorithm: Algorithm,
    pub model: Model,
    /// One objective value per iteration (see each algorithm for its definition).
    pub objective: Vec<f64>,
    /// Model after every iteration when [`TrainConfig::record_states`] is set.
    pub states: Vec<Model>,
    /// Arithmetic performed by the run.
    pub counter: OpCounter,
}

pub(crate) fn check_finite(m: &DenseMatrix, iteration: usize) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence { iteration })
    }
}
