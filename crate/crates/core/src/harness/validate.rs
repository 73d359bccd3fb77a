use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{generate_data, Dataset, GroundTruth};
use crate::priors::{softplus, whiten_coordinate, BesovLaplaceSpec, SmoothnessHyperPrior};
use crate::rng::{mix_seed, stream_rng, CHAIN_STREAM, DATA_STREAM};
use crate::samplers::{AlphaPrior, LaplaceChain, LaplaceSetup};
use crate::wavelet::{Boundary, EvalMode, WaveletBasis, WaveletFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    Roundtrip,
    Whitening,
    PriorRecovery,
    Oracle,
}

impl ValidationMode {
    pub const ALL: [ValidationMode; 4] = [
        ValidationMode::Roundtrip,
        ValidationMode::Whitening,
        ValidationMode::PriorRecovery,
        ValidationMode::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ValidationMode::Roundtrip => "roundtrip",
            ValidationMode::Whitening => "whitening",
            ValidationMode::PriorRecovery => "prior-recovery",
            ValidationMode::Oracle => "oracle",
        }
    }
}

impl FromStr for ValidationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('_', "-");
        ValidationMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::parse("validation mode", s))
    }
}

/// One measured statistic against its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured < self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, threshold: f64) {
        self.checks.push(Check {
            name: name.into(),
            measured,
            threshold,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<6} {}: {}  {:.3e} < {:.1e}",
                if c.passed() { "PASS" } else { "FAIL" },
                self.mode.name(),
                c.name,
                c.measured,
                c.threshold
            )?;
        }
        Ok(())
    }
}

/// Kolmogorov-Smirnov distance between the sample and `cdf`. Sorts in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let m = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        acc.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m)
    })
}

pub fn laplace_cdf(x: f64, scale: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / scale).exp()
    } else {
        1.0 - 0.5 * (-x / scale).exp()
    }
}

pub fn validate(mode: ValidationMode, seed: u64) -> Result<ValidationReport> {
    let mut report = ValidationReport { mode, checks: Vec::new() };
    match mode {
        ValidationMode::Roundtrip => roundtrip(&mut report, seed)?,
        ValidationMode::Whitening => whitening(&mut report, seed)?,
        ValidationMode::PriorRecovery => prior_recovery(&mut report, seed)?,
        ValidationMode::Oracle => oracle(&mut report, seed)?,
    }
    Ok(report)
}

fn roundtrip(report: &mut ValidationReport, seed: u64) -> Result<()> {
    const VECTORS: usize = 1000;
    let mut rng = stream_rng(seed, DATA_STREAM);
    for family in [WaveletFamily::Haar, WaveletFamily::Symmlet8] {
        for (dim, level) in [(1, 10), (2, 5)] {
            let basis = WaveletBasis::new(family, Boundary::SymmetricReflection, dim, level, 1024)?;
            let mut work = basis.workspace();
            let vol = basis.grid().cell_volume();
            let mut grid = vec![0.0; basis.grid().len()];
            let mut back = vec![0.0; 1024];
            let (mut identity, mut parseval) = (0.0f64, 0.0f64);
            for _ in 0..VECTORS {
                let c: Vec<f64> = (0..1024).map(|_| rng.sample(StandardNormal)).collect();
                basis.synthesize_into(&c, &mut grid, &mut work);
                basis.analyze_into(&grid, &mut back, &mut work);
                for (a, b) in c.iter().zip(&back) {
                    identity = identity.max((a - b).abs());
                }
                let coef_energy: f64 = c.iter().map(|v| v * v).sum();
                let grid_energy: f64 = grid.iter().map(|v| v * v).sum::<f64>() * vol;
                parseval = parseval.max((coef_energy - grid_energy).abs() / coef_energy);
            }
            let tag = format!("{family:?} d={dim}");
            report.push(format!("{tag} max |analyze(synthesize(c)) - c|"), identity, 1e-10);
            report.push(format!("{tag} relative Parseval defect"), parseval, 1e-8);
        }
    }
    Ok(())
}

fn whitening(report: &mut ValidationReport, seed: u64) -> Result<()> {
    const SAMPLES: usize = 100_000;
    let spec = BesovLaplaceSpec::new(2.0, 1, 1, 1)?;
    let mut rng = stream_rng(seed, DATA_STREAM);
    let mut out = Vec::with_capacity(SAMPLES);
    let mut odd = 0.0f64;
    for _ in 0..SAMPLES {
        let w: f64 = rng.sample(StandardNormal);
        let t = whiten_coordinate(w, 1, &spec);
        odd = odd.max((t + whiten_coordinate(-w, 1, &spec)).abs());
        out.push(t);
    }
    report.push("|T(0)|", whiten_coordinate(0.0, 1, &spec).abs(), f64::MIN_POSITIVE);
    report.push("max |T(w) + T(-w)|", odd, 1e-15);
    report.push("KS distance to Laplace(1)", ks_distance(&mut out, |x| laplace_cdf(x, 1.0)), 0.01);
    Ok(())
}

/// Prior law of the first coefficient under the hierarchical prior: a
/// Laplace scale mixture over the smoothness.
fn omega1_prior_cdf(hp: &SmoothnessHyperPrior, x: f64) -> f64 {
    const PANELS: usize = 400;
    let (lo, hi) = hp.support();
    let d = hp.dim() as f64;
    let ln_n = (hp.n() as f64).ln();
    let h = (hi - lo) / PANELS as f64;
    let f = |a: f64| hp.density(a) * laplace_cdf(x, (-d * ln_n / (2.0 * a + d)).exp());
    let mut sum = f(lo + 1e-12 * (hi - lo)) + f(hi);
    for i in 1..PANELS {
        sum += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Empty-data chain: the smoothness draws must follow the hyper-prior and
/// the first coefficient its prior marginal.
pub fn prior_recovery_draws(seed: u64, prior_n: usize, draws: usize, thinning: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let basis = Arc::new(WaveletBasis::new(WaveletFamily::Symmlet8, Boundary::SymmetricReflection, 1, 6, 16)?);
    let setup = LaplaceSetup::hierarchical(basis, prior_n)?;
    let data = Dataset::empty(1)?;
    let mut rng = stream_rng(mix_seed(seed, &[prior_n as u64]), CHAIN_STREAM);
    let mut chain = LaplaceChain::new(&setup, &data, EvalMode::Nearest, None, &mut rng)?;
    let (delta1, delta2) = (1.0, 0.49);
    let burn_in = 2_000;
    let (mut alpha, mut omega1) = (Vec::with_capacity(draws), Vec::with_capacity(draws));
    for step in 0..burn_in + draws * thinning {
        chain.alpha_step(delta1, &mut rng)?;
        chain.wpcn_step(delta2, &mut rng)?;
        if step >= burn_in && (step - burn_in) % thinning == 0 {
            alpha.push(chain.state().alpha);
            omega1.push(chain.state().omega[0]);
        }
    }
    Ok((alpha, omega1))
}

fn prior_recovery(report: &mut ValidationReport, seed: u64) -> Result<()> {
    let prior_n = 1000;
    let (mut alpha, mut omega1) = prior_recovery_draws(seed, prior_n, 10_000, 25)?;
    let hp = SmoothnessHyperPrior::new(prior_n, 1)?;
    report.push("KS distance of alpha draws to the hyper-prior", ks_distance(&mut alpha, |a| hp.cdf(a)), 0.02);
    report.push(
        "KS distance of omega_1 draws to its prior marginal",
        ks_distance(&mut omega1, |x| omega1_prior_cdf(&hp, x)),
        0.03,
    );
    Ok(())
}

/// The two-coefficient test problem: coefficient 1 and 2 of the 1D
/// Symmlet basis, smoothness fixed at 2, ten data points.
pub struct OracleProblem {
    pub setup: LaplaceSetup,
    pub data: Dataset,
    pub alpha: f64,
}

impl OracleProblem {
    pub fn new(seed: u64) -> Result<Self> {
        let basis = Arc::new(WaveletBasis::new(WaveletFamily::Symmlet8, Boundary::SymmetricReflection, 1, 10, 2)?);
        let alpha = 2.0;
        let n = 10;
        let setup = LaplaceSetup {
            basis,
            alpha_prior: AlphaPrior::Fixed(alpha),
            prior_n: n,
            laplace_scale: 1.0,
        };
        let data = generate_data(&GroundTruth::Sigmoid1D, n, seed)?;
        Ok(OracleProblem { setup, data, alpha })
    }

    /// Posterior mean of `(omega_1, omega_2)` from a chain of `steps` steps.
    pub fn mcmc_mean(&self, seed: u64, steps: usize) -> Result<[f64; 2]> {
        let mut rng = stream_rng(seed, CHAIN_STREAM);
        let mut chain = LaplaceChain::new(&self.setup, &self.data, EvalMode::Nearest, None, &mut rng)?;
        let burn_in = steps / 20;
        let mut sum = [0.0; 2];
        for step in 0..steps {
            chain.wpcn_step(0.4, &mut rng)?;
            if step >= burn_in {
                sum[0] += chain.state().omega[0];
                sum[1] += chain.state().omega[1];
            }
        }
        let kept = (steps - burn_in) as f64;
        Ok([sum[0] / kept, sum[1] / kept])
    }

    /// Posterior mean by midpoint quadrature on a `points x points` grid.
    pub fn quadrature_mean(&self, points: usize) -> Result<[f64; 2]> {
        let basis = &self.setup.basis;
        let shape = basis.grid();
        let mut work = basis.workspace();
        let mut atoms = [vec![0.0; shape.len()], vec![0.0; shape.len()]];
        for (l, atom) in atoms.iter_mut().enumerate() {
            let mut c = [0.0; 2];
            c[l] = 1.0;
            basis.synthesize_into(&c, atom, &mut work);
        }
        let obs: Vec<(f64, f64, f64)> = (0..self.data.len())
            .map(|i| {
                let node = shape.nearest(self.data.point(i))?;
                Ok((atoms[0][node], atoms[1][node], f64::from(self.data.labels()[i])))
            })
            .collect::<Result<_>>()?;
        let spec = BesovLaplaceSpec::new(self.alpha, self.setup.prior_n, 1, 2)?;
        let scale = [spec.coefficient_scale(1), spec.coefficient_scale(2)];
        let half = [16.0 * scale[0], 16.0 * scale[1]];
        let h = [2.0 * half[0] / points as f64, 2.0 * half[1] / points as f64];
        let node = |k: usize, i: usize| -half[k] + (i as f64 + 0.5) * h[k];

        let mut log_post = Vec::with_capacity(points * points);
        for i in 0..points {
            let a = node(0, i);
            for j in 0..points {
                let b = node(1, j);
                let ll: f64 = obs.iter().map(|&(g1, g2, y)| {
                    let w = a * g1 + b * g2;
                    y * w - softplus(w)
                }).sum();
                log_post.push(ll - a.abs() / scale[0] - b.abs() / scale[1]);
            }
        }
        let top = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for i in 0..points {
            for j in 0..points {
                let wgt = (log_post[i * points + j] - top).exp();
                z += wgt;
                m1 += wgt * node(0, i);
                m2 += wgt * node(1, j);
            }
        }
        Ok([m1 / z, m2 / z])
    }
}

fn oracle(report: &mut ValidationReport, seed: u64) -> Result<()> {
    let problem = OracleProblem::new(seed)?;
    let exact = problem.quadrature_mean(400)?;
    let mcmc = problem.mcmc_mean(mix_seed(seed, &[2]), 100_000)?;
    for k in 0..2 {
        report.push(
            format!("|E[w_{}] mcmc - quadrature| ({:.4} vs {:.4})", k + 1, mcmc[k], exact[k]),
            (mcmc[k] - exact[k]).abs(),
            0.02,
        );
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_names_round_trip() {
        for m in ValidationMode::ALL {
            assert_eq!(m.name().parse::<ValidationMode>().unwrap(), m);
        }
        assert!("bogus".parse::<ValidationMode>().is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let mut xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_distance(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }

    #[test]
    fn mixture_cdf_is_a_distribution() {
        let hp = SmoothnessHyperPrior::new(1000, 1).unwrap();
        assert!((omega1_prior_cdf(&hp, 0.0) - 0.5).abs() < 1e-6);
        assert!(omega1_prior_cdf(&hp, 50.0) > 1.0 - 1e-6);
        assert!(omega1_prior_cdf(&hp, -50.0) < 1e-6);
    }
}
