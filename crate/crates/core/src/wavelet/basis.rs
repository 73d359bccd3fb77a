use std::sync::Arc;

use nalgebra::DMatrix;

use super::coeffs::{CoefficientIndex, CoefficientVector, Subband};
use super::grid::{GridFunction, GridShape};
use super::level::{polynomial_moments, LevelOperator};
use super::{filters, Boundary, WaveletFamily};
use crate::error::{Error, Result};

/// Orthonormal wavelet basis on `[0,1]^d`, realised on a dyadic grid of
/// `2^max_level` points per axis and truncated to the first `truncation`
/// single-index coefficients.
///
/// Single-index order: the coarsest scaling coefficient first, then detail
/// levels `j = 0, 1, ..` in turn. Within a 2D level the horizontal, vertical
/// and diagonal sub-bands follow each other, each in row-major location
/// order.
#[derive(Debug)]
pub struct WaveletBasis {
    family: WaveletFamily,
    boundary: Boundary,
    shape: GridShape,
    truncation: usize,
    /// `levels[s]` acts on signals of length `2^(s+1)`.
    levels: Vec<LevelOperator>,
    /// Transform-layout position of each single index.
    position: Vec<usize>,
    index: Vec<CoefficientIndex>,
    scale: f64,
}

/// Scratch buffers for the fast transforms; reuse one per thread.
#[derive(Debug, Default, Clone)]
pub struct TransformWorkspace {
    layout: Vec<f64>,
    line_in: Vec<f64>,
    line_out: Vec<f64>,
}

impl WaveletBasis {
    pub fn new(
        family: WaveletFamily,
        boundary: Boundary,
        dim: usize,
        max_level: u32,
        truncation: usize,
    ) -> Result<Self> {
        let shape = GridShape::new(dim, max_level)?;
        if max_level == 0 {
            return Err(Error::config("wavelet grid needs at least two points per axis"));
        }
        if truncation == 0 || truncation > shape.len() {
            return Err(Error::config(format!(
                "truncation {truncation} must lie in 1..={} for d={dim}, J={max_level}",
                shape.len()
            )));
        }
        let lo: &[f64] = match family {
            WaveletFamily::Haar => &filters::HAAR,
            WaveletFamily::Symmlet8 => &filters::SYMMLET8,
        };
        let mut moments = match boundary {
            Boundary::SymmetricReflection => polynomial_moments(1 << max_level, lo.len() / 2),
            Boundary::Periodic => DMatrix::zeros(1 << max_level, 0),
        };
        let mut levels = Vec::with_capacity(max_level as usize);
        for s in (1..=max_level).rev() {
            let op = LevelOperator::new(1 << s, lo, boundary, &moments)?;
            moments = op.coarse_moments(&moments);
            levels.push(op);
        }
        levels.reverse();
        let (position, index) = single_index_order(shape);
        Ok(WaveletBasis {
            family,
            boundary,
            shape,
            truncation,
            levels,
            position: position[..truncation].to_vec(),
            index: index[..truncation].to_vec(),
            scale: (shape.len() as f64).sqrt(),
        })
    }

    /// Default basis for the dimension: Symmlet-8 with symmetric
    /// reflection on 1024 grid points (`J = 10` in 1D, `32 x 32` in 2D).
    pub fn default_for(dim: usize) -> Result<Self> {
        let level = if dim == 2 { 5 } else { 10 };
        WaveletBasis::new(
            WaveletFamily::Symmlet8,
            Boundary::SymmetricReflection,
            dim,
            level,
            1024,
        )
    }

    pub fn family(&self) -> WaveletFamily {
        self.family
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn max_level(&self) -> u32 {
        self.shape.level()
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn grid(&self) -> GridShape {
        self.shape
    }

    /// `(level, location, sub-band)` of every retained single index.
    pub fn index_map(&self) -> &[CoefficientIndex] {
        &self.index
    }

    pub fn workspace(&self) -> TransformWorkspace {
        let n = self.shape.per_axis();
        TransformWorkspace {
            layout: vec![0.0; self.shape.len()],
            line_in: vec![0.0; n],
            line_out: vec![0.0; n],
        }
    }

    fn ensure(&self, work: &mut TransformWorkspace) {
        if work.layout.len() != self.shape.len() || work.line_in.len() != self.shape.per_axis() {
            *work = self.workspace();
        }
    }

    /// Grid values of `sum_l coeffs[l] psi_l`. `coeffs.len()` must equal the
    /// truncation.
    pub fn synthesize_into(&self, coeffs: &[f64], grid: &mut [f64], work: &mut TransformWorkspace) {
        assert_eq!(coeffs.len(), self.truncation, "coefficient length");
        assert_eq!(grid.len(), self.shape.len(), "grid length");
        self.ensure(work);
        let layout = &mut work.layout;
        layout.fill(0.0);
        for (&pos, &c) in self.position.iter().zip(coeffs) {
            layout[pos] = c;
        }
        let n = self.shape.per_axis();
        match self.dim() {
            1 => {
                for op in &self.levels {
                    let m = op.len();
                    op.synthesize(&mut layout[..m], &mut work.line_out);
                    layout[..m].copy_from_slice(&work.line_out[..m]);
                }
            }
            _ => {
                for op in &self.levels {
                    let m = op.len();
                    for c in 0..m {
                        for r in 0..m {
                            work.line_in[r] = layout[r * n + c];
                        }
                        op.synthesize(&mut work.line_in[..m], &mut work.line_out);
                        for r in 0..m {
                            layout[r * n + c] = work.line_out[r];
                        }
                    }
                    for r in 0..m {
                        let row = &mut layout[r * n..r * n + m];
                        op.synthesize(row, &mut work.line_out);
                        row.copy_from_slice(&work.line_out[..m]);
                    }
                }
            }
        }
        for (g, &v) in grid.iter_mut().zip(layout.iter()) {
            *g = v * self.scale;
        }
    }

    /// First `truncation` coefficients of the grid function with values `grid`.
    pub fn analyze_into(&self, grid: &[f64], coeffs: &mut [f64], work: &mut TransformWorkspace) {
        assert_eq!(coeffs.len(), self.truncation, "coefficient length");
        assert_eq!(grid.len(), self.shape.len(), "grid length");
        self.ensure(work);
        let layout = &mut work.layout;
        let inv = self.scale.recip();
        for (l, &v) in layout.iter_mut().zip(grid) {
            *l = v * inv;
        }
        let n = self.shape.per_axis();
        match self.dim() {
            1 => {
                for op in self.levels.iter().rev() {
                    let m = op.len();
                    op.analyze(&layout[..m], &mut work.line_out);
                    layout[..m].copy_from_slice(&work.line_out[..m]);
                }
            }
            _ => {
                for op in self.levels.iter().rev() {
                    let m = op.len();
                    for r in 0..m {
                        let row = &mut layout[r * n..r * n + m];
                        op.analyze(row, &mut work.line_out);
                        row.copy_from_slice(&work.line_out[..m]);
                    }
                    for c in 0..m {
                        for r in 0..m {
                            work.line_in[r] = layout[r * n + c];
                        }
                        op.analyze(&work.line_in[..m], &mut work.line_out);
                        for r in 0..m {
                            layout[r * n + c] = work.line_out[r];
                        }
                    }
                }
            }
        }
        for (c, &pos) in coeffs.iter_mut().zip(&self.position) {
            *c = layout[pos];
        }
    }

    pub fn synthesize(&self, coeffs: &CoefficientVector) -> Result<GridFunction> {
        self.check_compatible(coeffs)?;
        let mut grid = vec![0.0; self.shape.len()];
        self.synthesize_into(coeffs.values(), &mut grid, &mut self.workspace());
        GridFunction::new(self.shape, grid)
    }

    pub fn analyze(self: &Arc<Self>, f: &GridFunction) -> Result<CoefficientVector> {
        if f.shape() != self.shape {
            return Err(Error::config(format!(
                "grid d={} J={} does not match basis d={} J={}",
                f.dim(),
                f.level(),
                self.dim(),
                self.max_level()
            )));
        }
        let mut coeffs = vec![0.0; self.truncation];
        self.analyze_into(f.values(), &mut coeffs, &mut self.workspace());
        CoefficientVector::new(Arc::clone(self), coeffs)
    }

    fn check_compatible(&self, coeffs: &CoefficientVector) -> Result<()> {
        let other = coeffs.basis();
        if other.shape != self.shape
            || other.family != self.family
            || other.boundary != self.boundary
            || coeffs.values().len() != self.truncation
        {
            return Err(Error::config("coefficient vector does not belong to this basis"));
        }
        Ok(())
    }
}

/// Transform-layout positions and indices in single-index order, for the
/// full (untruncated) basis.
fn single_index_order(shape: GridShape) -> (Vec<usize>, Vec<CoefficientIndex>) {
    let n = shape.per_axis();
    let mut position = Vec::with_capacity(shape.len());
    let mut index = Vec::with_capacity(shape.len());
    position.push(0);
    index.push(CoefficientIndex {
        level: 0,
        location: 0,
        subband: Subband::Scaling,
    });
    for level in 0..shape.level() {
        let s = 1usize << level;
        match shape.dim() {
            1 => {
                for k in 0..s {
                    position.push(s + k);
                    index.push(CoefficientIndex {
                        level,
                        location: k,
                        subband: Subband::Detail,
                    });
                }
            }
            _ => {
                let bands = [
                    (Subband::Horizontal, 0, s),
                    (Subband::Vertical, s, 0),
                    (Subband::Diagonal, s, s),
                ];
                for (subband, row0, col0) in bands {
                    for kr in 0..s {
                        for kc in 0..s {
                            position.push((row0 + kr) * n + col0 + kc);
                            index.push(CoefficientIndex {
                                level,
                                location: kr * s + kc,
                                subband,
                            });
                        }
                    }
                }
            }
        }
    }
    (position, index)
}

/// Convenience wrapper for [`WaveletBasis::synthesize`].
pub fn synthesize(coeffs: &CoefficientVector) -> Result<GridFunction> {
    coeffs.basis().synthesize(coeffs)
}
