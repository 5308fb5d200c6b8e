//! Factorized linear algebra over normalized data.
//!
//! A dataset produced by joining an entity table with one or more attribute
//! tables is represented as a [`NormalizedMatrix`]: the base-table matrices
//! plus sparse indicator matrices recording which base row feeds each output
//! row. Linear-algebra operators are executed against the base tables through
//! algebraic rewrites ([`rewrite`]), so the join result is never materialized.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. IO, file formats and the command line live in the companion
//! `normat` crate.
//!
//! Module map:
//!
//! - [`kernel`]: dense/CSR numeric matrices, instrumented products, SVD pseudo-inverse.
//! - [`normmat`]: indicator matrices, the normalized matrix and its construction.
//! - [`rewrite`]: factorized operators (aggregation, LMM/RMM, cross-product, ginv, DMM).
//! - [`costmodel`]: arithmetic-count predictions and the factorize/materialize decision.
//! - [`ml`]: logistic regression, linear regression, K-Means and GNMF over any [`ml::DataMatrix`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod costmodel;
mod error;
pub mod kernel;
pub mod ml;
pub mod normmat;
pub mod rewrite;

pub use error::{Error, Result};
pub use kernel::{CsrMatrix, DenseMatrix, NumericMatrix, OpCounter};
pub use normmat::{IndicatorMatrix, JoinKind, NormalizedMatrix, ShapeStats};
