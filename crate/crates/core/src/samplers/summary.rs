//! Posterior summaries of grid-valued draws: mean of the latent field
//! pushed through the link, and pointwise 2.5% / 97.5% quantiles of the
//! probability draws.

use super::config::QuantileMode;
use crate::error::{Error, Result};
use crate::priors::logistic;
use crate::wavelet::{GridFunction, GridShape};

pub const BAND_LOW: f64 = 0.025;
pub const BAND_HIGH: f64 = 0.975;

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorSummary {
    /// Pointwise mean of the latent draws.
    pub mean_w: GridFunction,
    /// `H(mean_w)`.
    pub mean_p: GridFunction,
    pub band_low: GridFunction,
    pub band_high: GridFunction,
    pub draws: usize,
    /// Hyper-parameter value after every step (smoothness for the Laplace
    /// chain, inverse length-scale for the Gaussian one).
    pub hyper_trace: Vec<f64>,
    /// Post-burn-in acceptance of the hyper-parameter block; `None` when
    /// the block is not sampled.
    pub acc_hyper: Option<f64>,
    pub acc_field: Option<f64>,
    /// Step sizes in force after burn-in.
    pub delta1: f64,
    pub delta2: f64,
}

/// Type-7 quantile of sorted data: linear interpolation between order
/// statistics at `h = (N - 1) q`.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of no data");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Jain-Chlamtac P-square estimator of a single quantile.
#[derive(Debug, Clone)]
pub struct P2Quantile {
    q: f64,
    count: usize,
    heights: [f64; 5],
    positions: [f64; 5],
    desired: [f64; 5],
    increments: [f64; 5],
}

impl P2Quantile {
    pub fn new(q: f64) -> Self {
        P2Quantile {
            q,
            count: 0,
            heights: [0.0; 5],
            positions: [1.0, 2.0, 3.0, 4.0, 5.0],
            desired: [1.0, 1.0 + 2.0 * q, 1.0 + 4.0 * q, 3.0 + 2.0 * q, 5.0],
            increments: [0.0, q / 2.0, q, (1.0 + q) / 2.0, 1.0],
        }
    }

    pub fn push(&mut self, x: f64) {
        if self.count < 5 {
            self.heights[self.count] = x;
            self.count += 1;
            if self.count == 5 {
                self.heights.sort_by(f64::total_cmp);
            }
            return;
        }
        self.count += 1;
        let h = &mut self.heights;
        let k = if x < h[0] {
            h[0] = x;
            0
        } else if x >= h[4] {
            h[4] = x;
            3
        } else {
            (0..4).find(|&i| x < h[i + 1]).unwrap_or(3)
        };
        for p in &mut self.positions[k + 1..] {
            *p += 1.0;
        }
        for (d, inc) in self.desired.iter_mut().zip(&self.increments) {
            *d += inc;
        }
        for i in 1..4 {
            let n = &mut self.positions;
            let d = self.desired[i] - n[i];
            if (d >= 1.0 && n[i + 1] - n[i] > 1.0) || (d <= -1.0 && n[i - 1] - n[i] < -1.0) {
                let s = d.signum();
                let parabolic = h[i]
                    + s / (n[i + 1] - n[i - 1])
                        * ((n[i] - n[i - 1] + s) * (h[i + 1] - h[i]) / (n[i + 1] - n[i])
                            + (n[i + 1] - n[i] - s) * (h[i] - h[i - 1]) / (n[i] - n[i - 1]));
                h[i] = if h[i - 1] < parabolic && parabolic < h[i + 1] {
                    parabolic
                } else {
                    let j = if s > 0.0 { i + 1 } else { i - 1 };
                    h[i] + s * (h[j] - h[i]) / (n[j] - n[i])
                };
                n[i] += s;
            }
        }
    }

    pub fn estimate(&self) -> f64 {
        if self.count >= 5 {
            return self.heights[2];
        }
        assert!(self.count > 0, "quantile of no data");
        let mut few = self.heights[..self.count].to_vec();
        few.sort_by(f64::total_cmp);
        quantile_type7(&few, self.q)
    }
}

/// Accumulates latent grid draws.
#[derive(Debug, Clone)]
pub(crate) struct DrawStore {
    shape: GridShape,
    count: usize,
    sum_w: Vec<f64>,
    /// Row-major `[draw][node]` probabilities (exact mode).
    p_draws: Vec<f32>,
    streaming: Vec<(P2Quantile, P2Quantile)>,
    mode: QuantileMode,
}

impl DrawStore {
    pub(crate) fn new(shape: GridShape, mode: QuantileMode, expected: usize) -> Self {
        let len = shape.len();
        DrawStore {
            shape,
            count: 0,
            sum_w: vec![0.0; len],
            p_draws: match mode {
                QuantileMode::Exact => Vec::with_capacity(expected * len),
                QuantileMode::Streaming => Vec::new(),
            },
            streaming: match mode {
                QuantileMode::Exact => Vec::new(),
                QuantileMode::Streaming => {
                    vec![(P2Quantile::new(BAND_LOW), P2Quantile::new(BAND_HIGH)); len]
                }
            },
            mode,
        }
    }

    pub(crate) fn push(&mut self, w: &[f64]) {
        self.count += 1;
        for (s, &v) in self.sum_w.iter_mut().zip(w) {
            *s += v;
        }
        match self.mode {
            QuantileMode::Exact => self.p_draws.extend(w.iter().map(|&v| logistic(v) as f32)),
            QuantileMode::Streaming => {
                for ((lo, hi), &v) in self.streaming.iter_mut().zip(w) {
                    let p = logistic(v);
                    lo.push(p);
                    hi.push(p);
                }
            }
        }
    }

    /// `(mean_w, mean_p, band_low, band_high)`.
    pub(crate) fn finish(self) -> Result<(GridFunction, GridFunction, GridFunction, GridFunction)> {
        if self.count == 0 {
            return Err(Error::config("no posterior draws were stored"));
        }
        let len = self.shape.len();
        let inv = 1.0 / self.count as f64;
        let mean_w: Vec<f64> = self.sum_w.iter().map(|s| s * inv).collect();
        let mean_p: Vec<f64> = mean_w.iter().map(|&w| logistic(w)).collect();
        let (low, high) = match self.mode {
            QuantileMode::Exact => {
                let mut column = vec![0.0f64; self.count];
                let mut low = vec![0.0; len];
                let mut high = vec![0.0; len];
                for node in 0..len {
                    for (c, row) in column.iter_mut().zip(self.p_draws.chunks_exact(len)) {
                        *c = row[node] as f64;
                    }
                    column.sort_unstable_by(f64::total_cmp);
                    low[node] = quantile_type7(&column, BAND_LOW);
                    high[node] = quantile_type7(&column, BAND_HIGH);
                }
                (low, high)
            }
            QuantileMode::Streaming => self
                .streaming
                .iter()
                .map(|(lo, hi)| {
                    let (a, b) = (lo.estimate(), hi.estimate());
                    (a.min(b), a.max(b))
                })
                .unzip(),
        };
        Ok((
            GridFunction::new(self.shape, mean_w)?,
            GridFunction::probability(self.shape, mean_p)?,
            GridFunction::probability(self.shape, low)?,
            GridFunction::probability(self.shape, high)?,
        ))
    }
}

/// Summary of an explicit list of latent draws (no chain diagnostics).
pub fn posterior_summary(shape: GridShape, w_draws: &[Vec<f64>], mode: QuantileMode) -> Result<PosteriorSummary> {
    let mut store = DrawStore::new(shape, mode, w_draws.len());
    for w in w_draws {
        if w.len() != shape.len() {
            return Err(Error::config(format!("draw has {} values, grid has {}", w.len(), shape.len())));
        }
        store.push(w);
    }
    let (mean_w, mean_p, band_low, band_high) = store.finish()?;
    Ok(PosteriorSummary {
        mean_w,
        mean_p,
        band_low,
        band_high,
        draws: w_draws.len(),
        hyper_trace: Vec::new(),
        acc_hyper: None,
        acc_field: None,
        delta1: f64::NAN,
        delta2: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type7_matches_hand_values() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type7(&x, 0.0), 1.0);
        assert_eq!(quantile_type7(&x, 1.0), 4.0);
        assert!((quantile_type7(&x, 0.5) - 2.5).abs() < 1e-15);
        assert!((quantile_type7(&x, 0.25) - 1.75).abs() < 1e-15);
        assert_eq!(quantile_type7(&[7.0], 0.975), 7.0);
    }

    #[test]
    fn single_draw_collapses_band() {
        let shape = GridShape::new(1, 3).unwrap();
        let w: Vec<f64> = (0..8).map(|i| i as f64 - 3.5).collect();
        for mode in [QuantileMode::Exact, QuantileMode::Streaming] {
            let s = posterior_summary(shape, std::slice::from_ref(&w), mode).unwrap();
            assert_eq!(s.mean_w.values(), &w[..]);
            for (i, &wi) in w.iter().enumerate() {
                let p = logistic(wi);
                assert_eq!(s.mean_p.values()[i], p);
                assert!((s.band_low.values()[i] - p).abs() < 1e-7);
                assert!((s.band_high.values()[i] - p).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn symmetric_draws_give_one_half() {
        let shape = GridShape::new(1, 1).unwrap();
        let s = posterior_summary(shape, &[vec![2.0, -1.0], vec![-2.0, -1.0]], QuantileMode::Exact).unwrap();
        assert_eq!(s.mean_w.values()[0], 0.0);
        assert_eq!(s.mean_p.values()[0], 0.5);
    }

    #[test]
    fn p2_tracks_uniform_quantiles() {
        let mut lo = P2Quantile::new(0.025);
        let mut hi = P2Quantile::new(0.975);
        // deterministic low-discrepancy sequence on (0,1)
        let golden = 0.618_033_988_749_894_9;
        for i in 1..=20_000 {
            let u = (i as f64 * golden).fract();
            lo.push(u);
            hi.push(u);
        }
        assert!((lo.estimate() - 0.025).abs() < 0.005);
        assert!((hi.estimate() - 0.975).abs() < 0.005);
    }
}
