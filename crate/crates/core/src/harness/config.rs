use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::GroundTruth;
use crate::samplers::{PriorKind, SamplerConfig};
use crate::wavelet::{Boundary, WaveletFamily};

/// Which priors a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorChoice {
    Laplace,
    Gaussian,
    Both,
}

impl PriorChoice {
    pub fn kinds(&self) -> Vec<PriorKind> {
        match self {
            PriorChoice::Laplace => vec![PriorKind::Laplace],
            PriorChoice::Gaussian => vec![PriorKind::Gaussian],
            PriorChoice::Both => vec![PriorKind::Laplace, PriorKind::Gaussian],
        }
    }
}

impl FromStr for PriorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "laplace" => Ok(PriorChoice::Laplace),
            "gaussian" | "gp" => Ok(PriorChoice::Gaussian),
            "both" => Ok(PriorChoice::Both),
            other => Err(Error::parse("prior", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConfig {
    pub family: WaveletFamily,
    pub boundary: Boundary,
    /// Grid level per axis; `None` picks 10 in 1D and 5 in 2D.
    pub level: Option<u32>,
    pub truncation: usize,
}

impl Default for BasisConfig {
    fn default() -> Self {
        BasisConfig {
            family: WaveletFamily::Symmlet8,
            boundary: Boundary::SymmetricReflection,
            level: None,
            truncation: 1024,
        }
    }
}

impl BasisConfig {
    pub fn level_for(&self, dim: usize) -> u32 {
        self.level.unwrap_or(if dim == 2 { 5 } else { 10 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianConfig {
    /// Comparator grid level per axis; `None` picks 7 in 1D and 5 in 2D.
    pub level: Option<u32>,
    pub jitter_start: f64,
    pub jitter_max: f64,
    pub a_init: f64,
}

impl Default for GaussianConfig {
    fn default() -> Self {
        GaussianConfig {
            level: None,
            jitter_start: 1e-10,
            jitter_max: 1e-6,
            a_init: 1.0,
        }
    }
}

/// Everything a sweep needs. Built from defaults, then a `key = value`
/// file, then command-line flags, each overriding the last.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub truth: GroundTruth,
    pub prior: PriorChoice,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub sampler: SamplerConfig,
    pub basis: BasisConfig,
    pub gaussian: GaussianConfig,
    pub laplace_scale: f64,
    pub output: PathBuf,
    pub master_seed: u64,
    /// Worker threads; `None` uses every available core.
    pub workers: Option<usize>,
    /// Keep finished rows of an existing results file and skip their cells.
    pub resume: bool,
    /// Record wall-clock seconds in the results rows (breaks byte
    /// reproducibility; a timing sidecar is always written).
    pub timing: bool,
}

pub const DESK_REPLICATIONS: usize = 10;
pub const FULL_REPLICATIONS: usize = 50;
pub const DEFAULT_N_LIST: [usize; 4] = [50, 200, 1000, 5000];

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            truth: GroundTruth::Sigmoid1D,
            prior: PriorChoice::Both,
            n_list: DEFAULT_N_LIST.to_vec(),
            replications: DESK_REPLICATIONS,
            sampler: SamplerConfig::default(),
            basis: BasisConfig::default(),
            gaussian: GaussianConfig::default(),
            laplace_scale: 1.0,
            output: PathBuf::from("results"),
            master_seed: 20250101,
            workers: None,
            resume: false,
            timing: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::parse(key, value.trim()))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Ok(true),
        "off" | "false" | "no" | "0" => Ok(false),
        _ => Err(Error::parse(key, value.trim())),
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    value
        .split([',', ' '])
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Sets one key. Keys match the long flag names; `-` and `_` are
    /// interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let s = &mut self.sampler;
        match key.as_str() {
            "truth" => self.truth = v.parse()?,
            "prior" => self.prior = v.parse()?,
            "n" | "n_list" => self.n_list = parse_list(&key, v)?,
            "reps" | "replications" => self.replications = parse(&key, v)?,
            "iters" | "iterations" => s.iterations = parse(&key, v)?,
            "burnin" | "burn_in" => s.burn_in = parse(&key, v)?,
            "thinning" => s.thinning = parse(&key, v)?,
            "seed" => self.master_seed = parse(&key, v)?,
            "out" | "output" => self.output = PathBuf::from(v),
            "adapt" => s.adapt = parse_bool(&key, v)?,
            "delta1" => s.delta1 = parse(&key, v)?,
            "delta2" => s.delta2 = parse(&key, v)?,
            "target_acceptance" => s.target_acceptance = parse(&key, v)?,
            "adapt_window" => s.adapt_window = parse(&key, v)?,
            "alpha_init" => s.alpha_init = Some(parse(&key, v)?),
            "eval_mode" => s.eval_mode = v.parse()?,
            "quantiles" => s.quantiles = v.parse()?,
            "trace_every" => s.trace_every = parse(&key, v)?,
            "family" => self.basis.family = v.parse()?,
            "boundary" => self.basis.boundary = v.parse()?,
            "level" => self.basis.level = Some(parse(&key, v)?),
            "truncation" => self.basis.truncation = parse(&key, v)?,
            "laplace_scale" => self.laplace_scale = parse(&key, v)?,
            "gp_level" => self.gaussian.level = Some(parse(&key, v)?),
            "jitter_start" => self.gaussian.jitter_start = parse(&key, v)?,
            "jitter_max" => self.gaussian.jitter_max = parse(&key, v)?,
            "a_init" => self.gaussian.a_init = parse(&key, v)?,
            "workers" => self.workers = Some(parse(&key, v)?),
            "resume" => self.resume = parse_bool(&key, v)?,
            "timing" => self.timing = parse_bool(&key, v)?,
            "paper_scale" => {
                if parse_bool(&key, v)? {
                    self.apply_full_scale();
                }
            }
            other => return Err(Error::config(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// The full protocol: 50 replications over `n = 50, 200, 1000, 5000`.
    pub fn apply_full_scale(&mut self) {
        self.replications = FULL_REPLICATIONS;
        self.n_list = DEFAULT_N_LIST.to_vec();
    }

    /// Applies a `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse("configuration", format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.truth.dim();
        if self.n_list.is_empty() {
            return Err(Error::config("empty sample-size list"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!("sample sizes {:?} must be strictly increasing", self.n_list)));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| !((n as f64).ln() > d as f64)) {
            return Err(Error::config(format!("n = {n} leaves no smoothness support in d = {d} (need n > e^d)")));
        }
        if self.replications == 0 {
            return Err(Error::config("replications must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers must be at least 1"));
        }
        if !(self.laplace_scale > 0.0) {
            return Err(Error::config("laplace_scale must be positive"));
        }
        let g = &self.gaussian;
        if !(g.jitter_start > 0.0 && g.jitter_start <= g.jitter_max) {
            return Err(Error::config("need 0 < jitter_start <= jitter_max"));
        }
        if !(g.a_init > 0.0) {
            return Err(Error::config("a_init must be positive"));
        }
        self.sampler.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# desk run\ntruth = step1d\nprior = laplace\nn = 200, 1000\nreps = 3 # short\nadapt = off\n",
        )
        .unwrap();
        assert_eq!(cfg.truth, GroundTruth::Step1D);
        assert_eq!(cfg.n_list, vec![200, 1000]);
        assert_eq!(cfg.replications, 3);
        assert!(!cfg.sampler.adapt);
        cfg.set("reps", "5").unwrap();
        cfg.set("target-acceptance", "0.25").unwrap();
        assert_eq!(cfg.replications, 5);
        assert_eq!(cfg.sampler.target_acceptance, 0.25);
        cfg.validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.set("colour", "blue").is_err());
        assert!(cfg.apply_text("truth step1d").is_err());
        cfg.n_list = vec![1000, 200];
        assert!(cfg.validate().is_err());
        cfg.n_list = vec![2];
        assert!(cfg.validate().is_err());
        cfg.truth = GroundTruth::block2d();
        cfg.n_list = vec![7];
        assert!(cfg.validate().is_err());
        cfg.n_list = vec![8];
        cfg.validate().unwrap();
    }

    #[test]
    fn full_scale_flag() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("n", "5000").unwrap();
        cfg.set("paper-scale", "on").unwrap();
        assert_eq!(cfg.replications, 50);
        assert_eq!(cfg.n_list, vec![50, 200, 1000, 5000]);
    }
}
