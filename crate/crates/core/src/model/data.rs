//! Labelled binary-classification samples with uniform covariates.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use super::truth::GroundTruth;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, DATA_STREAM};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    /// Covariates, `dim` values per observation.
    x: Vec<f64>,
    y: Vec<u8>,
    /// Provenance written into the CSV header.
    truth: String,
    seed: u64,
}

impl Dataset {
    pub fn new(dim: usize, x: Vec<f64>, y: Vec<u8>) -> Result<Self> {
        if dim == 0 || dim > 2 {
            return Err(Error::config(format!("unsupported dimension {dim}")));
        }
        if x.len() != dim * y.len() {
            return Err(Error::config(format!(
                "{} covariate values for {} labels in dimension {dim}",
                x.len(),
                y.len()
            )));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("covariate {v} outside [0,1]")));
        }
        if let Some(v) = y.iter().find(|&&v| v > 1) {
            return Err(Error::domain(format!("label {v} is not 0 or 1")));
        }
        Ok(Dataset {
            dim,
            x,
            y,
            truth: "custom".to_string(),
            seed: 0,
        })
    }

    /// No observations; the likelihood is identically one.
    pub fn empty(dim: usize) -> Result<Self> {
        Dataset::new(dim, Vec::new(), Vec::new())
    }

    pub fn with_provenance(mut self, truth: &str, seed: u64) -> Self {
        self.truth = truth.to_string();
        self.seed = seed;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.x[i * self.dim..(i + 1) * self.dim]
    }

    pub fn labels(&self) -> &[u8] {
        &self.y
    }

    pub fn truth_name(&self) -> &str {
        &self.truth
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# truth={} n={} seed={}\n", self.truth, self.len(), self.seed);
        out.push_str(if self.dim == 1 { "x1,y\n" } else { "x1,x2,y\n" });
        for i in 0..self.len() {
            for v in self.point(i) {
                let _ = write!(out, "{v},");
            }
            let _ = writeln!(out, "{}", self.y[i]);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::parse("dataset", "empty file"))?;
        let mut truth = None;
        let mut n = None;
        let mut seed = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("truth", v)) => truth = Some(v.to_string()),
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("seed", v)) => seed = v.parse::<u64>().ok(),
                _ => {}
            }
        }
        let (truth, n, seed) = match (truth, n, seed) {
            (Some(t), Some(n), Some(s)) => (t, n, s),
            _ => return Err(Error::parse("dataset header", header)),
        };
        let columns = lines.next().ok_or_else(|| Error::parse("dataset", "missing column header"))?;
        let dim = match columns.trim() {
            "x1,y" => 1,
            "x1,x2,y" => 2,
            other => return Err(Error::parse("dataset columns", other)),
        };
        let mut x = Vec::with_capacity(n * dim);
        let mut y = Vec::with_capacity(n);
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != dim + 1 {
                return Err(Error::parse("dataset row", line));
            }
            for f in &fields[..dim] {
                x.push(f.parse::<f64>().map_err(|e| Error::parse("covariate", format!("{f}: {e}")))?);
            }
            y.push(fields[dim].parse::<u8>().map_err(|e| Error::parse("label", format!("{}: {e}", fields[dim])))?);
        }
        if y.len() != n {
            return Err(Error::parse("dataset", format!("header says n={n}, found {} rows", y.len())));
        }
        Ok(Dataset::new(dim, x, y)?.with_provenance(&truth, seed))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Dataset::from_csv(&text)
    }
}

/// Draws `n` uniform covariates and Bernoulli labels from the truth. The
/// output depends only on `(truth, n, seed)`.
pub fn generate_data(truth: &GroundTruth, n: usize, seed: u64) -> Result<Dataset> {
    let dim = truth.dim();
    let mut rng = stream_rng(seed, DATA_STREAM);
    let mut x = Vec::with_capacity(n * dim);
    let mut y = Vec::with_capacity(n);
    let mut point = [0.0; 2];
    for _ in 0..n {
        for p in point.iter_mut().take(dim) {
            *p = rng.random::<f64>();
        }
        let prob = truth.eval(&point[..dim])?;
        x.extend_from_slice(&point[..dim]);
        y.push(u8::from(rng.random::<f64>() < prob));
    }
    Ok(Dataset::new(dim, x, y)?.with_provenance(truth.name(), seed))
}
