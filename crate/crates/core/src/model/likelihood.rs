//! Bernoulli log-likelihood of a classification surface.
//!
//! The covariate density is uniform and omitted.

use super::data::Dataset;
use crate::error::{Error, Result};
use crate::priors::{logistic, softplus};
use crate::wavelet::{EvalMode, GridFunction, GridShape, Stencil};

fn check_dims(shape: GridShape, data: &Dataset) -> Result<()> {
    if shape.dim() != data.dim() {
        return Err(Error::config(format!(
            "grid is {}-dimensional, data are {}-dimensional",
            shape.dim(),
            data.dim()
        )));
    }
    Ok(())
}

#[inline]
fn bernoulli_term(y: u8, p: f64) -> f64 {
    if y == 1 {
        p.ln()
    } else {
        (-p).ln_1p()
    }
}

/// `sum_i Y_i ln p(X_i) + (1 - Y_i) ln(1 - p(X_i))`, with `p(X_i)` read off
/// the grid. An impossible observation gives `-inf`.
pub fn log_likelihood(p: &GridFunction, data: &Dataset, mode: EvalMode) -> Result<f64> {
    check_dims(p.shape(), data)?;
    if let Some(v) = p.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::domain(format!("probability surface takes the value {v}")));
    }
    let shape = p.shape();
    let mut total = 0.0;
    for (i, &y) in data.labels().iter().enumerate() {
        let prob = shape.stencil(data.point(i), mode)?.apply(p.values());
        total += bernoulli_term(y, prob.clamp(0.0, 1.0));
    }
    Ok(total)
}

#[derive(Debug, Clone)]
enum Layout {
    /// Per occupied cell: index, number of ones, total count.
    Cells(Vec<(usize, f64, f64)>),
    Points(Vec<(Stencil, u8)>),
}

/// Likelihood of a latent field `w` (so `p = H(w)`) with the data
/// pre-binned onto a fixed grid. This is what the samplers evaluate at
/// every step.
#[derive(Debug, Clone)]
pub struct BinnedLikelihood {
    shape: GridShape,
    layout: Layout,
}

impl BinnedLikelihood {
    pub fn new(shape: GridShape, data: &Dataset, mode: EvalMode) -> Result<Self> {
        check_dims(shape, data)?;
        let layout = match mode {
            EvalMode::Nearest => {
                let mut ones = vec![0usize; shape.len()];
                let mut total = vec![0usize; shape.len()];
                for (i, &y) in data.labels().iter().enumerate() {
                    let c = shape.nearest(data.point(i))?;
                    ones[c] += y as usize;
                    total[c] += 1;
                }
                Layout::Cells(
                    (0..shape.len())
                        .filter(|&c| total[c] > 0)
                        .map(|c| (c, ones[c] as f64, total[c] as f64))
                        .collect(),
                )
            }
            EvalMode::Interpolate => Layout::Points(
                data.labels()
                    .iter()
                    .enumerate()
                    .map(|(i, &y)| Ok((shape.stencil(data.point(i), mode)?, y)))
                    .collect::<Result<_>>()?,
            ),
        };
        Ok(BinnedLikelihood { shape, layout })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// Log-likelihood of `p = H(w)` for latent grid values `w`.
    pub fn latent(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.shape.len());
        match &self.layout {
            // n1 ln H(w) + n0 ln(1 - H(w)) = n1 w - n softplus(w)
            Layout::Cells(cells) => cells
                .iter()
                .map(|&(c, ones, total)| ones * w[c] - total * softplus(w[c]))
                .sum(),
            Layout::Points(points) => points
                .iter()
                .map(|(s, y)| {
                    let p = s.iter().map(|(node, wt)| wt * logistic(w[node])).sum::<f64>();
                    bernoulli_term(*y, p.clamp(0.0, 1.0))
                })
                .sum(),
        }
    }
}
