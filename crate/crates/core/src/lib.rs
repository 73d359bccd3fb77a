//! Hierarchical rescaled Besov-Laplace priors for nonparametric binary
//! classification.
//!
//! The crate is organised around five layers:
//!
//! * [`wavelet`]: boundary-adapted orthonormal wavelet bases on `[0,1]^d`
//!   (`d = 1, 2`), fast synthesis/analysis on dyadic grids and Besov norms.
//! * [`priors`]: the whitening map sending standard normals to rescaled
//!   Laplace coefficients, the smoothness hyper-prior, the logistic link and
//!   the squared-exponential Gaussian-process comparator.
//! * [`model`]: datasets, ground-truth surfaces, the Bernoulli likelihood and
//!   L1 error metrics.
//! * [`samplers`]: the whitened pCN-within-Gibbs chain, the pCN-within-Gibbs
//!   chain for the Gaussian comparator and posterior summaries.
//! * [`harness`]: the experiment runner behind the `besov-laplace` CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod model;
pub mod priors;
pub mod rng;
pub mod samplers;
pub mod wavelet;

pub use error::{Error, Result};
