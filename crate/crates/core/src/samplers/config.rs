use std::str::FromStr;

use crate::error::{Error, Result};
use crate::wavelet::EvalMode;

/// How the pointwise credible band is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuantileMode {
    /// Type-7 empirical quantiles of all stored draws.
    #[default]
    Exact,
    /// P-square streaming estimates; constant memory, approximate.
    Streaming,
}

impl FromStr for QuantileMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(QuantileMode::Exact),
            "streaming" | "p2" => Ok(QuantileMode::Streaming),
            other => Err(Error::parse("quantile mode", other)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    /// Random-walk step of the hyper-parameter block (smoothness or log
    /// inverse length-scale).
    pub delta1: f64,
    /// Crank-Nicolson step of the field block, in `(0, 1/2)`.
    pub delta2: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Robbins-Monro tuning of both steps during burn-in.
    pub adapt: bool,
    pub target_acceptance: f64,
    /// Steps per adaptation batch.
    pub adapt_window: usize,
    pub delta1_range: (f64, f64),
    pub delta2_range: (f64, f64),
    /// Starting smoothness; `d + 1` when unset.
    pub alpha_init: Option<f64>,
    pub eval_mode: EvalMode,
    pub quantiles: QuantileMode,
    /// Write a trace line every this many steps; 0 disables the trace.
    pub trace_every: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            delta1: 0.05,
            delta2: 0.01,
            iterations: 25_000,
            burn_in: 10_000,
            thinning: 1,
            adapt: true,
            target_acceptance: 0.30,
            adapt_window: 50,
            delta1_range: (0.001, 5.0),
            delta2_range: (0.001, 0.05),
            alpha_init: None,
            eval_mode: EvalMode::Nearest,
            quantiles: QuantileMode::Exact,
            trace_every: 0,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta1 > 0.0 && self.delta1.is_finite()) {
            return Err(Error::config(format!("delta1 = {} must be positive", self.delta1)));
        }
        if !(self.delta2 > 0.0 && self.delta2 < 0.5) {
            return Err(Error::config(format!("delta2 = {} must lie in (0, 1/2)", self.delta2)));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::config(format!(
                "burn-in {} must be below the {} iterations",
                self.burn_in, self.iterations
            )));
        }
        if self.thinning == 0 || self.adapt_window == 0 {
            return Err(Error::config("thinning and adaptation window must be positive"));
        }
        if !(self.target_acceptance > 0.0 && self.target_acceptance < 1.0) {
            return Err(Error::config(format!(
                "target acceptance {} must lie in (0,1)",
                self.target_acceptance
            )));
        }
        let (a, b) = self.delta1_range;
        if !(a > 0.0 && a <= b) {
            return Err(Error::config(format!("bad delta1 range [{a}, {b}]")));
        }
        let (a, b) = self.delta2_range;
        if !(a > 0.0 && a <= b && b < 0.5) {
            return Err(Error::config(format!("bad delta2 range [{a}, {b}]")));
        }
        Ok(())
    }

    /// Number of post-burn-in draws kept.
    pub fn kept_draws(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thinning)
    }
}
