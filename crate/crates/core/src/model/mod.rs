//! Observation model: datasets, ground truths, likelihood and error
//! metrics.

mod data;
mod likelihood;
mod metrics;
mod truth;

pub use data::{generate_data, Dataset};
pub use likelihood::{log_likelihood, BinnedLikelihood};
pub use metrics::{l1_error, L1Error};
pub use truth::{truth_eval, GroundTruth};
