//! pCN-within-Gibbs for the hierarchical Gaussian-process comparator.
//!
//! The field lives on the comparator's own grid and is interpolated
//! multilinearly onto the output grid, where the likelihood is evaluated.

use rand::Rng;
use rand_distr::StandardNormal;

use super::Chain;
use crate::error::{Error, Result};
use crate::model::{BinnedLikelihood, Dataset};
use crate::priors::{lengthscale_logdensity, CovarianceFactor, GaussianComparatorSpec};
use crate::wavelet::{EvalMode, GridShape, Stencil};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSetup {
    pub gp: GaussianComparatorSpec,
    /// Grid on which the likelihood and the summaries live.
    pub output: GridShape,
    pub a_init: f64,
}

impl GaussianSetup {
    pub fn default_for(output: GridShape) -> Result<Self> {
        Ok(GaussianSetup {
            gp: GaussianComparatorSpec::default_for(output.dim())?,
            output,
            a_init: 1.0,
        })
    }
}

#[derive(Debug, Clone)]
pub struct GaussianChain {
    setup: GaussianSetup,
    factor: CovarianceFactor,
    lik: BinnedLikelihood,
    /// `None` when the comparator grid is the output grid.
    upsample: Option<Vec<Stencil>>,
    z: Vec<f64>,
    loglik: f64,
    field: Vec<f64>,
    grid: Vec<f64>,
    prop_z: Vec<f64>,
    prop_field: Vec<f64>,
    prop_grid: Vec<f64>,
    scratch: Vec<f64>,
    failed_factorisations: usize,
}

impl GaussianChain {
    pub fn new<R: Rng>(setup: &GaussianSetup, data: &Dataset, mode: EvalMode, rng: &mut R) -> Result<Self> {
        let gp_grid = setup.gp.grid;
        if gp_grid.dim() != setup.output.dim() {
            return Err(Error::config("comparator and output grids differ in dimension"));
        }
        let factor = CovarianceFactor::new(&setup.gp, setup.a_init)?;
        let upsample = if gp_grid == setup.output {
            None
        } else {
            let d = setup.output.dim();
            let nodes = setup.output.nodes();
            Some(
                nodes
                    .chunks(d)
                    .map(|x| gp_grid.stencil(x, EvalMode::Interpolate))
                    .collect::<Result<Vec<_>>>()?,
            )
        };
        let lik = BinnedLikelihood::new(setup.output, data, mode)?;
        let m = gp_grid.len();
        let z: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        let mut chain = GaussianChain {
            setup: *setup,
            factor,
            lik,
            upsample,
            z,
            loglik: 0.0,
            field: vec![0.0; m],
            grid: vec![0.0; setup.output.len()],
            prop_z: vec![0.0; m],
            prop_field: vec![0.0; m],
            prop_grid: vec![0.0; setup.output.len()],
            scratch: Vec::new(),
            failed_factorisations: 0,
        };
        chain.factor.apply(&chain.z, &mut chain.field, &mut chain.scratch);
        Self::resample(&chain.upsample, &chain.field, &mut chain.grid);
        chain.loglik = chain.lik.latent(&chain.grid);
        Ok(chain)
    }

    fn resample(upsample: &Option<Vec<Stencil>>, field: &[f64], out: &mut [f64]) {
        match upsample {
            None => out.copy_from_slice(field),
            Some(stencils) => {
                for (o, s) in out.iter_mut().zip(stencils) {
                    *o = s.apply(field);
                }
            }
        }
    }

    pub fn a(&self) -> f64 {
        self.factor.a()
    }

    /// Proposals rejected because the covariance could not be factorised.
    pub fn failed_factorisations(&self) -> usize {
        self.failed_factorisations
    }

    fn aborted(&self, step: &str) -> Error {
        log::error!("comparator state at abort: A = {}, loglik = {}", self.a(), self.loglik);
        Error::ChainAborted {
            step: 0,
            reason: format!("log acceptance ratio of the {step} step is NaN"),
            alpha: self.a(),
            loglik: self.loglik,
        }
    }

    /// Random walk on `ln A` with the white noise held fixed.
    pub fn lengthscale_step<R: Rng>(&mut self, delta1: f64, rng: &mut R) -> Result<bool> {
        let z: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.random();
        let a = self.a();
        let proposal = a * (delta1 * z).exp();
        let d = self.setup.output.dim();
        // density of ln A is A p(A)
        let log_prior = |a: f64| lengthscale_logdensity(a, d) + a.ln();
        let factor = match CovarianceFactor::new(&self.setup.gp, proposal) {
            Ok(f) => f,
            Err(Error::Cholesky { .. }) => {
                self.failed_factorisations += 1;
                log::warn!("covariance at A = {proposal} could not be factorised; proposal rejected");
                return Ok(false);
            }
            Err(e) => return Err(e),
        };
        factor.apply(&self.z, &mut self.prop_field, &mut self.scratch);
        Self::resample(&self.upsample, &self.prop_field, &mut self.prop_grid);
        let ll = self.lik.latent(&self.prop_grid);
        let log_ratio = ll - self.loglik + log_prior(proposal) - log_prior(a);
        if log_ratio.is_nan() {
            return Err(self.aborted("length-scale"));
        }
        if u.ln() < log_ratio {
            self.factor = factor;
            self.loglik = ll;
            std::mem::swap(&mut self.field, &mut self.prop_field);
            std::mem::swap(&mut self.grid, &mut self.prop_grid);
            return Ok(true);
        }
        Ok(false)
    }

    /// Preconditioned Crank-Nicolson move on the white noise.
    pub fn pcn_step<R: Rng>(&mut self, delta2: f64, rng: &mut R) -> Result<bool> {
        let rho = (1.0 - 2.0 * delta2).sqrt();
        let beta = (2.0 * delta2).sqrt();
        for (p, &x) in self.prop_z.iter_mut().zip(&self.z) {
            let chi: f64 = rng.sample(StandardNormal);
            *p = rho * x + beta * chi;
        }
        let u: f64 = rng.random();
        self.factor.apply(&self.prop_z, &mut self.prop_field, &mut self.scratch);
        Self::resample(&self.upsample, &self.prop_field, &mut self.prop_grid);
        let ll = self.lik.latent(&self.prop_grid);
        let log_ratio = ll - self.loglik;
        if log_ratio.is_nan() {
            return Err(self.aborted("field"));
        }
        if u.ln() < log_ratio {
            self.loglik = ll;
            std::mem::swap(&mut self.z, &mut self.prop_z);
            std::mem::swap(&mut self.field, &mut self.prop_field);
            std::mem::swap(&mut self.grid, &mut self.prop_grid);
            return Ok(true);
        }
        Ok(false)
    }
}

impl Chain for GaussianChain {
    fn hyper_step<R: Rng>(&mut self, delta1: f64, rng: &mut R) -> Result<bool> {
        self.lengthscale_step(delta1, rng)
    }

    fn field_step<R: Rng>(&mut self, delta2: f64, rng: &mut R) -> Result<bool> {
        self.pcn_step(delta2, rng)
    }

    fn samples_hyper(&self) -> bool {
        true
    }

    fn hyper(&self) -> f64 {
        self.a()
    }

    fn loglik(&self) -> f64 {
        self.loglik
    }

    fn latent(&self) -> &[f64] {
        &self.grid
    }

    fn check_invariants(&mut self) -> f64 {
        let mut field = vec![0.0; self.field.len()];
        self.factor.apply(&self.z, &mut field, &mut self.scratch);
        let mut grid = vec![0.0; self.grid.len()];
        Self::resample(&self.upsample, &field, &mut grid);
        let ll = self.lik.latent(&grid);
        (ll - self.loglik).abs() / ll.abs().max(1.0)
    }
}
