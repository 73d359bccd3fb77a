//! The rescaled Besov-Laplace prior in whitened form.
//!
//! Coefficient `l` of a prior draw is
//! `s * n^{-d/(2 alpha + d)} * l^{-(alpha/d - 1/2)} * sgn(w) * (-ln(2 - 2 Phi(|w|)))`
//! with `w ~ N(0,1)`; `s` is the Laplace scale (1 by default).

use std::sync::Arc;

use super::normal::neg_log_two_sided_tail;
use crate::error::{Error, Result};
use crate::wavelet::CoefficientVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesovLaplaceSpec {
    pub alpha: f64,
    /// Sample size driving the rescaling.
    pub n: usize,
    pub dim: usize,
    pub truncation: usize,
    pub laplace_scale: f64,
}

impl BesovLaplaceSpec {
    pub fn new(alpha: f64, n: usize, dim: usize, truncation: usize) -> Result<Self> {
        let spec = BesovLaplaceSpec {
            alpha,
            n,
            dim,
            truncation,
            laplace_scale: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_laplace_scale(mut self, scale: f64) -> Result<Self> {
        self.laplace_scale = scale;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("dimension must be positive"));
        }
        if !(self.alpha > self.dim as f64) {
            return Err(Error::domain(format!(
                "regularity {} must exceed the dimension {}",
                self.alpha, self.dim
            )));
        }
        if self.n == 0 {
            return Err(Error::domain("rescaling sample size must be at least 1"));
        }
        if !(self.laplace_scale > 0.0) || !self.laplace_scale.is_finite() {
            return Err(Error::domain(format!("Laplace scale {} must be positive", self.laplace_scale)));
        }
        Ok(())
    }

    /// `n^{-d/(2 alpha + d)}`, in `(0, 1]`.
    pub fn rescaling(&self) -> f64 {
        rescaling(self.n as f64, self.dim, self.alpha)
    }

    /// Laplace scale of coefficient `l` (one-based).
    pub fn coefficient_scale(&self, l: usize) -> f64 {
        let d = self.dim as f64;
        self.laplace_scale * self.rescaling() * (l as f64).powf(-(self.alpha / d - 0.5))
    }
}

#[inline]
fn rescaling(n: f64, dim: usize, alpha: f64) -> f64 {
    let d = dim as f64;
    (-d * n.ln() / (2.0 * alpha + d)).exp()
}

/// Whitening map for a single coordinate `l` (one-based).
pub fn whiten_coordinate(w: f64, l: usize, spec: &BesovLaplaceSpec) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    spec.coefficient_scale(l) * w.signum() * neg_log_two_sided_tail(w)
}

/// Applies the whitening map coordinate-wise to standard-normal
/// coefficients.
pub fn whiten_transform(xi: &CoefficientVector, spec: &BesovLaplaceSpec) -> Result<CoefficientVector> {
    if xi.len() != spec.truncation {
        return Err(Error::config(format!(
            "prior truncation {} does not match {} coefficients",
            spec.truncation,
            xi.len()
        )));
    }
    if let Some(v) = xi.values().iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite white-noise coefficient {v}")));
    }
    let values = xi
        .values()
        .iter()
        .enumerate()
        .map(|(i, &w)| whiten_coordinate(w, i + 1, spec))
        .collect();
    CoefficientVector::new(Arc::clone(xi.basis()), values)
}

/// Sampler-side whitening: the `alpha`-dependent scales and the
/// `alpha`-free standard-Laplace part are kept separately, so a change of
/// `alpha` costs one pass of exponentials and no normal tails.
#[derive(Debug, Clone)]
pub struct Whitening {
    ln_index: Vec<f64>,
    ln_n: f64,
    dim: f64,
    laplace_scale: f64,
}

impl Whitening {
    pub fn new(n: usize, dim: usize, truncation: usize, laplace_scale: f64) -> Result<Self> {
        if n == 0 || dim == 0 {
            return Err(Error::config("whitening needs n >= 1 and d >= 1"));
        }
        if !(laplace_scale > 0.0) {
            return Err(Error::domain("Laplace scale must be positive"));
        }
        Ok(Whitening {
            ln_index: (1..=truncation).map(|l| (l as f64).ln()).collect(),
            ln_n: (n as f64).ln(),
            dim: dim as f64,
            laplace_scale,
        })
    }

    pub fn truncation(&self) -> usize {
        self.ln_index.len()
    }

    /// Per-coefficient scales `s n^{-d/(2 alpha + d)} l^{-(alpha/d - 1/2)}`.
    pub fn scales(&self, alpha: f64, out: &mut [f64]) {
        let log_prefactor = self.laplace_scale.ln() - self.dim * self.ln_n / (2.0 * alpha + self.dim);
        let decay = alpha / self.dim - 0.5;
        for (o, &ln_l) in out.iter_mut().zip(&self.ln_index) {
            *o = (log_prefactor - decay * ln_l).exp();
        }
    }

    /// Signed standard-Laplace variables `sgn(w) (-ln(2 - 2 Phi(|w|)))`.
    pub fn standard_laplace(xi: &[f64], out: &mut [f64]) {
        for (o, &w) in out.iter_mut().zip(xi) {
            *o = if w == 0.0 { 0.0 } else { w.signum() * neg_log_two_sided_tail(w) };
        }
    }
}
