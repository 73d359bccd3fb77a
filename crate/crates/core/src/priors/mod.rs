//! Priors on the latent field: the rescaled Besov-Laplace prior in
//! whitened form, the hyper-prior on its smoothness, the logistic link and
//! the Gaussian-process comparator.

mod gaussian;
mod hyper;
mod laplace;
mod link;
mod normal;

pub use gaussian::{gp_draw, lengthscale_logdensity, CovarianceFactor, GaussianComparatorSpec};
pub use hyper::{
    adaptive_simpson, hyperprior_logdensity, hyperprior_normalizer, SmoothnessHyperPrior,
    QUADRATURE_TOLERANCE,
};
pub use laplace::{whiten_coordinate, whiten_transform, BesovLaplaceSpec, Whitening};
pub use link::{link, link_inverse, log_logistic, logistic, logit, softplus};
pub use normal::{neg_log_two_sided_tail, std_normal_cdf};
