//! Hierarchical Gaussian-process comparator: square-exponential covariance
//! `exp(-A |x - y|^2)` on a dyadic grid, with `A^d ~ Gamma(1, 1)`.
//!
//! The kernel factorises over coordinates, so on a tensor grid the 2D
//! covariance is `K1 (x) K1` and its factor is `L1 (x) L1`. The jitter is
//! added to the one-dimensional factor.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::wavelet::{GridFunction, GridShape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComparatorSpec {
    pub grid: GridShape,
    /// First diagonal regulariser tried, relative to the mean variance.
    pub jitter_start: f64,
    /// Largest regulariser before giving up.
    pub jitter_max: f64,
}

impl GaussianComparatorSpec {
    pub fn new(grid: GridShape) -> Self {
        GaussianComparatorSpec {
            grid,
            jitter_start: 1e-10,
            jitter_max: 1e-6,
        }
    }

    /// 128 points in 1D, 32 x 32 in 2D.
    pub fn default_for(dim: usize) -> Result<Self> {
        let level = match dim {
            1 => 7,
            2 => 5,
            _ => return Err(Error::config(format!("unsupported dimension {dim}"))),
        };
        Ok(Self::new(GridShape::new(dim, level)?))
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Dense covariance over all grid points (tests and diagnostics).
    pub fn covariance(&self, a: f64) -> DMatrix<f64> {
        let nodes = self.grid.nodes();
        let d = self.dim();
        let m = self.grid.len();
        DMatrix::from_fn(m, m, |i, j| {
            let r2: f64 = (0..d)
                .map(|k| (nodes[i * d + k] - nodes[j * d + k]).powi(2))
                .sum();
            (-a * r2).exp()
        })
    }
}

/// Lower Cholesky factor of the one-dimensional kernel matrix, applied as
/// `L x` in 1D and `L X L^T` in 2D.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    dim: usize,
    side: usize,
    /// Row-major lower-triangular factor.
    lower: Vec<f64>,
    a: f64,
    jitter: f64,
}

impl CovarianceFactor {
    pub fn new(spec: &GaussianComparatorSpec, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("inverse length-scale must be positive, got {a}")));
        }
        let side = spec.grid.per_axis();
        let axis: Vec<f64> = (0..side).map(|i| (2 * i + 1) as f64 / (2 * side) as f64).collect();
        let kernel = DMatrix::from_fn(side, side, |i, j| (-a * (axis[i] - axis[j]).powi(2)).exp());
        // unit diagonal, so trace / points = 1
        let mut jitter = spec.jitter_start;
        loop {
            let mut k = kernel.clone();
            for i in 0..side {
                k[(i, i)] += jitter;
            }
            if let Some(chol) = k.cholesky() {
                let l = chol.l();
                let lower = (0..side * side).map(|idx| l[(idx / side, idx % side)]).collect();
                return Ok(CovarianceFactor {
                    dim: spec.dim(),
                    side,
                    lower,
                    a,
                    jitter,
                });
            }
            jitter *= 10.0;
            if jitter > spec.jitter_max * (1.0 + 1e-9) {
                return Err(Error::Cholesky {
                    a,
                    jitter: spec.jitter_max,
                });
            }
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.side == 0
    }

    /// `out = L z` (1D) or `out = (L (x) L) z` (2D, row-major grid).
    pub fn apply(&self, z: &[f64], out: &mut [f64], scratch: &mut Vec<f64>) {
        let s = self.side;
        let l = &self.lower;
        match self.dim {
            1 => {
                for i in 0..s {
                    let row = &l[i * s..i * s + i + 1];
                    out[i] = row.iter().zip(&z[..=i]).map(|(a, b)| a * b).sum();
                }
            }
            _ => {
                // T = L Z, then out = T L^T
                scratch.clear();
                scratch.resize(s * s, 0.0);
                for i in 0..s {
                    for k in 0..=i {
                        let lik = l[i * s + k];
                        let zr = &z[k * s..(k + 1) * s];
                        for (t, &v) in scratch[i * s..(i + 1) * s].iter_mut().zip(zr) {
                            *t += lik * v;
                        }
                    }
                }
                for i in 0..s {
                    let trow = &scratch[i * s..(i + 1) * s];
                    for j in 0..s {
                        let lrow = &l[j * s..j * s + j + 1];
                        out[i * s + j] = lrow.iter().zip(&trow[..=j]).map(|(a, b)| a * b).sum();
                    }
                }
            }
        }
    }
}

/// A draw `L_A z` of the comparator field for white noise `z`.
pub fn gp_draw(spec: &GaussianComparatorSpec, a: f64, white_noise: &[f64]) -> Result<GridFunction> {
    if white_noise.len() != spec.grid.len() {
        return Err(Error::config(format!(
            "white noise has {} entries, grid has {}",
            white_noise.len(),
            spec.grid.len()
        )));
    }
    let factor = CovarianceFactor::new(spec, a)?;
    let mut out = vec![0.0; white_noise.len()];
    factor.apply(white_noise, &mut out, &mut Vec::new());
    GridFunction::new(spec.grid, out)
}

/// Log density of `A` when `A^d` is standard exponential.
pub fn lengthscale_logdensity(a: f64, dim: usize) -> f64 {
    if !(a > 0.0) {
        return f64::NEG_INFINITY;
    }
    let d = dim as f64;
    d.ln() + (d - 1.0) * a.ln() - a.powf(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_gives_zero_field() {
        for dim in [1, 2] {
            let spec = GaussianComparatorSpec::default_for(dim).unwrap();
            let f = gp_draw(&spec, 3.0, &vec![0.0; spec.grid.len()]).unwrap();
            assert!(f.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn unit_diagonal() {
        let spec = GaussianComparatorSpec::new(GridShape::new(2, 3).unwrap());
        let k = spec.covariance(0.37);
        for i in 0..k.nrows() {
            assert_eq!(k[(i, i)], 1.0);
        }
        assert!((&k - k.transpose()).abs().max() == 0.0);
    }

    #[test]
    fn factor_reproduces_covariance() {
        for (dim, level) in [(1, 5), (2, 3)] {
            let spec = GaussianComparatorSpec::new(GridShape::new(dim, level).unwrap());
            let a = 40.0;
            let factor = CovarianceFactor::new(&spec, a).unwrap();
            let m = spec.grid.len();
            let mut cols = vec![vec![0.0; m]; m];
            let mut scratch = Vec::new();
            for (c, col) in cols.iter_mut().enumerate() {
                let mut e = vec![0.0; m];
                e[c] = 1.0;
                factor.apply(&e, col, &mut scratch);
            }
            let k = spec.covariance(a);
            for i in 0..m {
                for j in 0..m {
                    let v: f64 = (0..m).map(|c| cols[c][i] * cols[c][j]).sum();
                    assert!((v - k[(i, j)]).abs() < 1e-5, "dim {dim} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn lengthscale_density_values() {
        assert_eq!(lengthscale_logdensity(1.0, 1), -1.0);
        assert!((lengthscale_logdensity(1.0, 2) - (2f64.ln() - 1.0)).abs() < 1e-15);
        assert_eq!(lengthscale_logdensity(0.0, 1), f64::NEG_INFINITY);
        assert_eq!(lengthscale_logdensity(-1.0, 2), f64::NEG_INFINITY);
    }

    #[test]
    fn very_smooth_kernels_still_factorise() {
        let spec = GaussianComparatorSpec::default_for(1).unwrap();
        for a in [1e-3, 0.1, 1.0, 1e4] {
            assert!(CovarianceFactor::new(&spec, a).is_ok(), "A = {a}");
        }
        assert!(CovarianceFactor::new(&spec, 0.0).is_err());
    }
}
