//! MCMC for the hierarchical posteriors: the driver shared by both priors,
//! step-size adaptation and posterior summaries.

mod config;
mod gaussian;
mod laplace;
mod summary;

use std::fmt::Write as _;
use std::str::FromStr;

use rand::Rng;

pub use config::{QuantileMode, SamplerConfig};
pub use gaussian::{GaussianChain, GaussianSetup};
pub use laplace::{AlphaPrior, ChainState, LaplaceChain, LaplaceSetup};
pub use summary::{posterior_summary, quantile_type7, P2Quantile, PosteriorSummary, BAND_HIGH, BAND_LOW};

use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::rng::{stream_rng, CHAIN_STREAM};
use crate::wavelet::GridShape;
use summary::DrawStore;

/// Steps between consistency checks in debug builds.
const INVARIANT_CHECK_EVERY: usize = 1000;

/// One Metropolis-within-Gibbs chain: a hyper-parameter block and a field
/// block, alternated.
pub trait Chain {
    fn hyper_step<R: Rng>(&mut self, delta1: f64, rng: &mut R) -> Result<bool>;
    fn field_step<R: Rng>(&mut self, delta2: f64, rng: &mut R) -> Result<bool>;
    fn samples_hyper(&self) -> bool;
    fn hyper(&self) -> f64;
    fn loglik(&self) -> f64;
    /// Latent field on the output grid.
    fn latent(&self) -> &[f64];
    /// Largest discrepancy between cached and recomputed state.
    fn check_invariants(&mut self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PriorKind {
    Laplace,
    Gaussian,
}

impl PriorKind {
    pub fn name(&self) -> &'static str {
        match self {
            PriorKind::Laplace => "laplace",
            PriorKind::Gaussian => "gaussian",
        }
    }

    pub fn id(&self) -> u64 {
        match self {
            PriorKind::Laplace => 1,
            PriorKind::Gaussian => 2,
        }
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laplace" => Ok(PriorKind::Laplace),
            "gaussian" | "gp" => Ok(PriorKind::Gaussian),
            other => Err(Error::parse("prior", other)),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ChainSetup {
    Laplace(LaplaceSetup),
    Gaussian(GaussianSetup),
}

impl ChainSetup {
    pub fn kind(&self) -> PriorKind {
        match self {
            ChainSetup::Laplace(_) => PriorKind::Laplace,
            ChainSetup::Gaussian(_) => PriorKind::Gaussian,
        }
    }

    pub fn output_grid(&self) -> GridShape {
        match self {
            ChainSetup::Laplace(s) => s.basis.grid(),
            ChainSetup::Gaussian(s) => s.output,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    pub summary: PosteriorSummary,
    /// `step,alpha,loglik,acc1,acc2` lines when tracing is on.
    pub trace: Option<String>,
}

/// Robbins-Monro update of `ln delta` after each batch during burn-in.
#[derive(Debug, Clone)]
struct Adapter {
    batch: usize,
    accepted: usize,
    proposed: usize,
}

impl Adapter {
    fn new() -> Self {
        Adapter {
            batch: 0,
            accepted: 0,
            proposed: 0,
        }
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as usize;
    }

    fn update(&mut self, delta: f64, target: f64, range: (f64, f64)) -> f64 {
        if self.proposed == 0 {
            return delta;
        }
        self.batch += 1;
        let rate = self.accepted as f64 / self.proposed as f64;
        let gain = (self.batch as f64).sqrt().recip();
        self.accepted = 0;
        self.proposed = 0;
        (delta.ln() + gain * (rate - target)).exp().clamp(range.0, range.1)
    }
}

/// Runs a chain for `cfg.iterations` steps from the stream
/// `(cfg.seed, CHAIN_STREAM)` and summarises the post-burn-in draws.
pub fn run_chain(setup: &ChainSetup, data: &Dataset, cfg: &SamplerConfig) -> Result<ChainOutput> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, CHAIN_STREAM);
    match setup {
        ChainSetup::Laplace(s) => {
            let chain = LaplaceChain::new(s, data, cfg.eval_mode, cfg.alpha_init, &mut rng)?;
            drive(chain, setup.output_grid(), cfg, &mut rng)
        }
        ChainSetup::Gaussian(s) => {
            let chain = GaussianChain::new(s, data, cfg.eval_mode, &mut rng)?;
            drive(chain, setup.output_grid(), cfg, &mut rng)
        }
    }
}

/// The step loop shared by both priors.
pub fn drive<C: Chain, R: Rng>(mut chain: C, grid: GridShape, cfg: &SamplerConfig, rng: &mut R) -> Result<ChainOutput> {
    cfg.validate()?;
    let (mut delta1, mut delta2) = (cfg.delta1, cfg.delta2);
    let (mut adapt1, mut adapt2) = (Adapter::new(), Adapter::new());
    let mut store = DrawStore::new(grid, cfg.quantiles, cfg.kept_draws());
    let mut hyper_trace = Vec::with_capacity(cfg.iterations);
    let (mut acc1_all, mut acc2_all) = (0usize, 0usize);
    let (mut acc1_post, mut acc2_post) = (0usize, 0usize);
    let mut trace = (cfg.trace_every > 0).then(|| String::from("step,alpha,loglik,acc1,acc2\n"));

    for step in 0..cfg.iterations {
        let a1 = chain.hyper_step(delta1, rng)?;
        let a2 = chain.field_step(delta2, rng)?;
        if chain.loglik().is_nan() {
            return Err(Error::ChainAborted {
                step,
                reason: "log-likelihood is NaN".to_string(),
                alpha: chain.hyper(),
                loglik: chain.loglik(),
            });
        }
        acc1_all += a1 as usize;
        acc2_all += a2 as usize;
        hyper_trace.push(chain.hyper());

        if step < cfg.burn_in {
            if cfg.adapt {
                adapt1.record(a1);
                adapt2.record(a2);
                if (step + 1) % cfg.adapt_window == 0 {
                    if chain.samples_hyper() {
                        delta1 = adapt1.update(delta1, cfg.target_acceptance, cfg.delta1_range);
                    }
                    delta2 = adapt2.update(delta2, cfg.target_acceptance, cfg.delta2_range);
                }
            }
        } else {
            acc1_post += a1 as usize;
            acc2_post += a2 as usize;
            if (step - cfg.burn_in).is_multiple_of(cfg.thinning) {
                store.push(chain.latent());
            }
        }

        if let Some(t) = trace.as_mut() {
            if (step + 1) % cfg.trace_every == 0 {
                let done = (step + 1) as f64;
                let _ = writeln!(
                    t,
                    "{},{},{},{},{}",
                    step + 1,
                    chain.hyper(),
                    chain.loglik(),
                    acc1_all as f64 / done,
                    acc2_all as f64 / done
                );
            }
        }

        if cfg!(debug_assertions) && (step + 1) % INVARIANT_CHECK_EVERY == 0 {
            let defect = chain.check_invariants();
            debug_assert!(defect < 1e-8, "cached chain state drifted by {defect} at step {step}");
        }
    }

    let post = (cfg.iterations - cfg.burn_in) as f64;
    let (mean_w, mean_p, band_low, band_high) = store.finish()?;
    let summary = PosteriorSummary {
        mean_w,
        mean_p,
        band_low,
        band_high,
        draws: cfg.kept_draws(),
        hyper_trace,
        acc_hyper: chain.samples_hyper().then(|| acc1_post as f64 / post),
        acc_field: Some(acc2_post as f64 / post),
        delta1,
        delta2,
    };
    Ok(ChainOutput { summary, trace })
}
