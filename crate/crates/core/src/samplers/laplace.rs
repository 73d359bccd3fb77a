//! wpCN-within-Gibbs for the hierarchical Besov-Laplace posterior.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use super::Chain;
use crate::error::{Error, Result};
use crate::model::{BinnedLikelihood, Dataset};
use crate::priors::{SmoothnessHyperPrior, Whitening};
use crate::wavelet::{CoefficientVector, EvalMode, TransformWorkspace, WaveletBasis};

/// Law of the smoothness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPrior {
    Hierarchical(SmoothnessHyperPrior),
    /// Point mass; the smoothness block is skipped.
    Fixed(f64),
}

impl AlphaPrior {
    fn log_density(&self, alpha: f64) -> f64 {
        match self {
            AlphaPrior::Hierarchical(hp) => hp.log_unnormalized(alpha),
            AlphaPrior::Fixed(a) => {
                if alpha == *a {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct LaplaceSetup {
    pub basis: Arc<WaveletBasis>,
    pub alpha_prior: AlphaPrior,
    /// Sample size entering the rescaling `n^{-d/(2 alpha + d)}`.
    pub prior_n: usize,
    pub laplace_scale: f64,
}

impl LaplaceSetup {
    /// Hierarchical prior with the rescaling and hyper-prior tied to `n`.
    pub fn hierarchical(basis: Arc<WaveletBasis>, n: usize) -> Result<Self> {
        let hp = SmoothnessHyperPrior::new(n, basis.dim())?;
        Ok(LaplaceSetup {
            basis,
            alpha_prior: AlphaPrior::Hierarchical(hp),
            prior_n: n,
            laplace_scale: 1.0,
        })
    }
}

/// Current `(alpha, xi, omega)` with the cached log-likelihood and
/// acceptance tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub alpha: f64,
    /// Whitened coefficients.
    pub xi: Vec<f64>,
    /// `T_alpha(xi)`.
    pub omega: Vec<f64>,
    pub loglik: f64,
    pub alpha_proposed: usize,
    pub alpha_accepted: usize,
    pub field_proposed: usize,
    pub field_accepted: usize,
}

#[derive(Debug, Clone)]
pub struct LaplaceChain {
    basis: Arc<WaveletBasis>,
    prior: AlphaPrior,
    whitening: Whitening,
    lik: BinnedLikelihood,
    work: TransformWorkspace,
    state: ChainState,
    /// Standard-Laplace part of `xi` and the per-coefficient scales at the
    /// current smoothness.
    lap: Vec<f64>,
    scales: Vec<f64>,
    grid: Vec<f64>,
    prop_xi: Vec<f64>,
    prop_lap: Vec<f64>,
    prop_scales: Vec<f64>,
    prop_omega: Vec<f64>,
    prop_grid: Vec<f64>,
}

impl LaplaceChain {
    /// Starts at `alpha_init` (default `d + 1`, or the middle of the
    /// support when that falls outside it) with a white-noise draw for `xi`.
    pub fn new<R: Rng>(
        setup: &LaplaceSetup,
        data: &Dataset,
        mode: EvalMode,
        alpha_init: Option<f64>,
        rng: &mut R,
    ) -> Result<Self> {
        let basis = Arc::clone(&setup.basis);
        let d = basis.dim();
        let alpha = match setup.alpha_prior {
            AlphaPrior::Fixed(a) => {
                if !(a > d as f64) {
                    return Err(Error::domain(format!("fixed smoothness {a} must exceed d = {d}")));
                }
                a
            }
            AlphaPrior::Hierarchical(hp) => {
                if hp.dim() != d {
                    return Err(Error::config("hyper-prior and basis dimensions differ"));
                }
                let start = alpha_init.unwrap_or(d as f64 + 1.0);
                if hp.contains(start) {
                    start
                } else {
                    let (lo, hi) = hp.support();
                    0.5 * (lo + hi)
                }
            }
        };
        let l = basis.truncation();
        let xi: Vec<f64> = (0..l).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_state(setup, data, mode, alpha, xi)
    }

    /// A chain positioned at a given `(alpha, xi)`.
    pub fn from_state(setup: &LaplaceSetup, data: &Dataset, mode: EvalMode, alpha: f64, xi: Vec<f64>) -> Result<Self> {
        let basis = Arc::clone(&setup.basis);
        let l = basis.truncation();
        if xi.len() != l {
            return Err(Error::config(format!("{} whitened coefficients for truncation {l}", xi.len())));
        }
        let whitening = Whitening::new(setup.prior_n, basis.dim(), l, setup.laplace_scale)?;
        let lik = BinnedLikelihood::new(basis.grid(), data, mode)?;
        let m = basis.grid().len();
        let mut chain = LaplaceChain {
            work: basis.workspace(),
            basis,
            prior: setup.alpha_prior,
            whitening,
            lik,
            state: ChainState {
                alpha,
                xi,
                omega: vec![0.0; l],
                loglik: 0.0,
                alpha_proposed: 0,
                alpha_accepted: 0,
                field_proposed: 0,
                field_accepted: 0,
            },
            lap: vec![0.0; l],
            scales: vec![0.0; l],
            grid: vec![0.0; m],
            prop_xi: vec![0.0; l],
            prop_lap: vec![0.0; l],
            prop_scales: vec![0.0; l],
            prop_omega: vec![0.0; l],
            prop_grid: vec![0.0; m],
        };
        Whitening::standard_laplace(&chain.state.xi, &mut chain.lap);
        chain.whitening.scales(alpha, &mut chain.scales);
        for ((o, s), z) in chain.state.omega.iter_mut().zip(&chain.scales).zip(&chain.lap) {
            *o = s * z;
        }
        chain.basis.synthesize_into(&chain.state.omega, &mut chain.grid, &mut chain.work);
        chain.state.loglik = chain.lik.latent(&chain.grid);
        Ok(chain)
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn omega(&self) -> Result<CoefficientVector> {
        CoefficientVector::new(Arc::clone(&self.basis), self.state.omega.clone())
    }

    /// Latent field on the basis grid at the current state.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    fn propose_loglik(&mut self) -> f64 {
        self.basis.synthesize_into(&self.prop_omega, &mut self.prop_grid, &mut self.work);
        self.lik.latent(&self.prop_grid)
    }

    fn aborted(&self, reason: &str) -> Error {
        log::error!(
            "chain state at abort: alpha = {}, loglik = {}, xi[..4] = {:?}, omega[..4] = {:?}",
            self.state.alpha,
            self.state.loglik,
            &self.state.xi[..self.state.xi.len().min(4)],
            &self.state.omega[..self.state.omega.len().min(4)]
        );
        Error::ChainAborted {
            step: self.state.field_proposed,
            reason: reason.to_string(),
            alpha: self.state.alpha,
            loglik: self.state.loglik,
        }
    }

    /// Random-walk move on the smoothness with the white noise held fixed.
    /// Proposals outside the support are rejected. Returns whether the
    /// proposal was accepted.
    pub fn alpha_step<R: Rng>(&mut self, delta1: f64, rng: &mut R) -> Result<bool> {
        if let AlphaPrior::Fixed(_) = self.prior {
            return Ok(false);
        }
        self.state.alpha_proposed += 1;
        let z: f64 = rng.sample(StandardNormal);
        let u: f64 = rng.random();
        let proposal = self.state.alpha + delta1 * z;
        let log_prior = self.prior.log_density(proposal);
        if log_prior == f64::NEG_INFINITY {
            return Ok(false);
        }
        self.whitening.scales(proposal, &mut self.prop_scales);
        for ((o, s), z) in self.prop_omega.iter_mut().zip(&self.prop_scales).zip(&self.lap) {
            *o = s * z;
        }
        let ll = self.propose_loglik();
        let log_ratio = ll - self.state.loglik + log_prior - self.prior.log_density(self.state.alpha);
        if log_ratio.is_nan() {
            return Err(self.aborted("log acceptance ratio of the smoothness step is NaN"));
        }
        if u.ln() < log_ratio {
            self.state.alpha = proposal;
            self.state.loglik = ll;
            std::mem::swap(&mut self.scales, &mut self.prop_scales);
            std::mem::swap(&mut self.state.omega, &mut self.prop_omega);
            std::mem::swap(&mut self.grid, &mut self.prop_grid);
            self.state.alpha_accepted += 1;
            return Ok(true);
        }
        Ok(false)
    }

    /// Whitened Crank-Nicolson move on `xi` at the current smoothness.
    pub fn wpcn_step<R: Rng>(&mut self, delta2: f64, rng: &mut R) -> Result<bool> {
        self.state.field_proposed += 1;
        let rho = (1.0 - 2.0 * delta2).sqrt();
        let beta = (2.0 * delta2).sqrt();
        for (p, &x) in self.prop_xi.iter_mut().zip(&self.state.xi) {
            let chi: f64 = rng.sample(StandardNormal);
            *p = rho * x + beta * chi;
        }
        let u: f64 = rng.random();
        Whitening::standard_laplace(&self.prop_xi, &mut self.prop_lap);
        for ((o, s), z) in self.prop_omega.iter_mut().zip(&self.scales).zip(&self.prop_lap) {
            *o = s * z;
        }
        let ll = self.propose_loglik();
        let log_ratio = ll - self.state.loglik;
        if log_ratio.is_nan() {
            return Err(self.aborted("log acceptance ratio of the field step is NaN"));
        }
        if u.ln() < log_ratio {
            self.state.loglik = ll;
            std::mem::swap(&mut self.state.xi, &mut self.prop_xi);
            std::mem::swap(&mut self.lap, &mut self.prop_lap);
            std::mem::swap(&mut self.state.omega, &mut self.prop_omega);
            std::mem::swap(&mut self.grid, &mut self.prop_grid);
            self.state.field_accepted += 1;
            return Ok(true);
        }
        Ok(false)
    }

    /// Recomputes `omega` and the log-likelihood from `(alpha, xi)` and
    /// returns the largest discrepancy with the cached values.
    pub fn consistency_defect(&mut self) -> f64 {
        let mut lap = vec![0.0; self.lap.len()];
        let mut scales = vec![0.0; self.lap.len()];
        Whitening::standard_laplace(&self.state.xi, &mut lap);
        self.whitening.scales(self.state.alpha, &mut scales);
        let mut worst = 0.0f64;
        for ((o, s), z) in self.state.omega.iter().zip(&scales).zip(&lap) {
            worst = worst.max((o - s * z).abs());
        }
        let mut grid = vec![0.0; self.grid.len()];
        self.basis.synthesize_into(&self.state.omega, &mut grid, &mut self.work);
        let ll = self.lik.latent(&grid);
        worst.max((ll - self.state.loglik).abs() / ll.abs().max(1.0))
    }
}

impl Chain for LaplaceChain {
    fn hyper_step<R: Rng>(&mut self, delta1: f64, rng: &mut R) -> Result<bool> {
        self.alpha_step(delta1, rng)
    }

    fn field_step<R: Rng>(&mut self, delta2: f64, rng: &mut R) -> Result<bool> {
        self.wpcn_step(delta2, rng)
    }

    fn samples_hyper(&self) -> bool {
        matches!(self.prior, AlphaPrior::Hierarchical(_))
    }

    fn hyper(&self) -> f64 {
        self.state.alpha
    }

    fn loglik(&self) -> f64 {
        self.state.loglik
    }

    fn latent(&self) -> &[f64] {
        &self.grid
    }

    fn check_invariants(&mut self) -> f64 {
        self.consistency_defect()
    }
}
