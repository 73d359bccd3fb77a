//! Dyadic midpoint grids on `[0,1]^d` and functions sampled on them.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Shape of a dyadic grid: `2^level` midpoints per axis, `dim` axes.
///
/// Node `i` along an axis sits at `(2i + 1) / 2^(level + 1)`. In 2D the flat
/// index is row-major, `i0 * 2^level + i1`, with `i0` the index along the
/// first coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridShape {
    dim: usize,
    level: u32,
}

/// How a grid function is evaluated away from its nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Value of the node whose cell contains the point.
    #[default]
    Nearest,
    /// Multilinear interpolation between midpoints, constant beyond the
    /// outermost midpoints.
    Interpolate,
}

impl std::str::FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(EvalMode::Nearest),
            "interpolate" | "linear" => Ok(EvalMode::Interpolate),
            other => Err(Error::parse("eval mode", other)),
        }
    }
}

/// Interpolation weights of one point: up to four `(node, weight)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    nodes: [usize; 4],
    weights: [f64; 4],
    len: usize,
}

impl Stencil {
    fn single(node: usize) -> Self {
        Stencil {
            nodes: [node, 0, 0, 0],
            weights: [1.0, 0.0, 0.0, 0.0],
            len: 1,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.nodes[..self.len]
            .iter()
            .copied()
            .zip(self.weights[..self.len].iter().copied())
    }

    #[inline]
    pub fn apply(&self, values: &[f64]) -> f64 {
        self.iter().map(|(i, w)| w * values[i]).sum()
    }
}

/// Linear weights along one axis: `(i0, i1, t)` with value `(1-t) v[i0] + t v[i1]`.
fn axis_weights(x: f64, per_axis: usize) -> (usize, usize, f64) {
    let u = x * per_axis as f64 - 0.5;
    if u <= 0.0 || per_axis == 1 {
        return (0, 0, 0.0);
    }
    let last = per_axis - 1;
    if u >= last as f64 {
        return (last, last, 0.0);
    }
    let i0 = u.floor() as usize;
    (i0, i0 + 1, u - i0 as f64)
}

impl GridShape {
    pub fn new(dim: usize, level: u32) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::config(format!("dimension must be 1 or 2, got {dim}")));
        }
        if level as usize * dim > 24 {
            return Err(Error::config(format!("grid level {level} too large for d={dim}")));
        }
        Ok(GridShape { dim, level })
    }

    /// Infers the shape from a number of grid values.
    pub fn from_len(dim: usize, len: usize) -> Result<Self> {
        let per_axis = match dim {
            1 => len,
            2 => (len as f64).sqrt().round() as usize,
            _ => return Err(Error::config(format!("dimension must be 1 or 2, got {dim}"))),
        };
        if per_axis == 0 || !per_axis.is_power_of_two() || per_axis.pow(dim as u32) != len {
            return Err(Error::config(format!("{len} values do not form a dyadic grid in d={dim}")));
        }
        GridShape::new(dim, per_axis.trailing_zeros())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn per_axis(&self) -> usize {
        1 << self.level
    }

    pub fn len(&self) -> usize {
        self.per_axis().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Cell volume `2^(-level * dim)`.
    pub fn cell_volume(&self) -> f64 {
        (self.len() as f64).recip()
    }

    /// Coordinates of node `index`; unused coordinates are zero.
    pub fn node(&self, index: usize) -> [f64; 2] {
        let n = self.per_axis();
        let mid = |i: usize| (2 * i + 1) as f64 / (2 * n) as f64;
        match self.dim {
            1 => [mid(index), 0.0],
            _ => [mid(index / n), mid(index % n)],
        }
    }

    /// Flat coordinates of all nodes, `dim` values per node.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len())
            .flat_map(|i| {
                let p = self.node(i);
                p.into_iter().take(self.dim)
            })
            .collect()
    }

    fn check_point(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::config(format!(
                "point has {} coordinates, grid has dimension {}",
                point.len(),
                self.dim
            )));
        }
        if point.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::domain(format!("point {point:?} lies outside [0,1]^{}", self.dim)));
        }
        Ok(())
    }

    /// Index of the cell containing `point`.
    pub fn nearest(&self, point: &[f64]) -> Result<usize> {
        self.check_point(point)?;
        let n = self.per_axis();
        let cell = |x: f64| ((x * n as f64) as usize).min(n - 1);
        Ok(match self.dim {
            1 => cell(point[0]),
            _ => cell(point[0]) * n + cell(point[1]),
        })
    }

    pub fn stencil(&self, point: &[f64], mode: EvalMode) -> Result<Stencil> {
        match mode {
            EvalMode::Nearest => self.nearest(point).map(Stencil::single),
            EvalMode::Interpolate => {
                self.check_point(point)?;
                let n = self.per_axis();
                let mut s = Stencil::single(0);
                match self.dim {
                    1 => {
                        let (i0, i1, t) = axis_weights(point[0], n);
                        s.nodes[..2].copy_from_slice(&[i0, i1]);
                        s.weights[..2].copy_from_slice(&[1.0 - t, t]);
                        s.len = 2;
                    }
                    _ => {
                        let (r0, r1, tr) = axis_weights(point[0], n);
                        let (c0, c1, tc) = axis_weights(point[1], n);
                        s.nodes = [r0 * n + c0, r0 * n + c1, r1 * n + c0, r1 * n + c1];
                        s.weights = [
                            (1.0 - tr) * (1.0 - tc),
                            (1.0 - tr) * tc,
                            tr * (1.0 - tc),
                            tr * tc,
                        ];
                        s.len = 4;
                    }
                }
                Ok(s)
            }
        }
    }
}

/// Function values on a dyadic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    shape: GridShape,
    values: Vec<f64>,
    probability: bool,
}

impl GridFunction {
    pub fn new(shape: GridShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::config(format!(
                "expected {} grid values for d={} J={}, got {}",
                shape.len(),
                shape.dim(),
                shape.level(),
                values.len()
            )));
        }
        Ok(GridFunction {
            shape,
            values,
            probability: false,
        })
    }

    /// A probability surface; every value must lie in `[0,1]`.
    pub fn probability(shape: GridShape, values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("probability value {v} outside [0,1]")));
        }
        let mut f = GridFunction::new(shape, values)?;
        f.probability = true;
        Ok(f)
    }

    pub fn zeros(shape: GridShape) -> Self {
        GridFunction::constant(shape, 0.0)
    }

    pub fn constant(shape: GridShape, value: f64) -> Self {
        GridFunction {
            shape,
            values: vec![value; shape.len()],
            probability: false,
        }
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(shape: GridShape, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..shape.len())
            .map(|i| f(&shape.node(i)[..shape.dim()]))
            .collect();
        GridFunction {
            shape,
            values,
            probability: false,
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn level(&self) -> u32 {
        self.shape.level()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    /// Evaluates at flat `points` (`dim` coordinates each).
    pub fn evaluate_at(&self, points: &[f64], mode: EvalMode) -> Result<Vec<f64>> {
        let d = self.dim();
        if !points.len().is_multiple_of(d) {
            return Err(Error::config(format!(
                "{} coordinates do not split into {d}-dimensional points",
                points.len()
            )));
        }
        points
            .chunks_exact(d)
            .map(|p| Ok(self.shape.stencil(p, mode)?.apply(&self.values)))
            .collect()
    }

    /// Resamples onto another grid by evaluating at its nodes.
    pub fn resample(&self, target: GridShape, mode: EvalMode) -> Result<GridFunction> {
        if target.dim() != self.dim() {
            return Err(Error::config("cannot resample across dimensions"));
        }
        let values = self.evaluate_at(&target.nodes(), mode)?;
        let mut out = GridFunction::new(target, values)?;
        out.probability = self.probability;
        Ok(out)
    }

    /// `# d=<d> J=<J>` followed by one value per line.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# d={} J={}\n", self.dim(), self.level());
        for v in &self.values {
            writeln!(s, "{v}").unwrap();
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("grid function", "empty input"))?;
        let mut dim = None;
        let mut level = None;
        for token in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = token.strip_prefix("d=") {
                dim = v.parse::<usize>().ok();
            } else if let Some(v) = token.strip_prefix("J=") {
                level = v.parse::<u32>().ok();
            }
        }
        let (Some(dim), Some(level)) = (dim, level) else {
            return Err(Error::parse("grid function header", header));
        };
        let shape = GridShape::new(dim, level)?;
        let values = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::parse("grid value", format!("{l:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(shape, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        GridFunction::from_csv(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_constant_everywhere() {
        let shape = GridShape::new(2, 3).unwrap();
        let f = GridFunction::constant(shape, 0.37);
        let pts = [0.0, 0.0, 1.0, 1.0, 0.3, 0.91, 0.5, 0.5];
        for mode in [EvalMode::Nearest, EvalMode::Interpolate] {
            for v in f.evaluate_at(&pts, mode).unwrap() {
                assert!((v - 0.37).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn nodes_are_reproduced_in_both_modes() {
        let shape = GridShape::new(1, 4).unwrap();
        let f = GridFunction::from_fn(shape, |x| (7.0 * x[0]).sin());
        let nodes = shape.nodes();
        for mode in [EvalMode::Nearest, EvalMode::Interpolate] {
            assert_eq!(f.evaluate_at(&nodes, mode).unwrap(), f.values());
        }
        let shape2 = GridShape::new(2, 2).unwrap();
        let g = GridFunction::from_fn(shape2, |x| x[0] - 3.0 * x[1]);
        assert_eq!(g.evaluate_at(&shape2.nodes(), EvalMode::Interpolate).unwrap(), g.values());
    }

    #[test]
    fn interpolation_is_exact_for_ramps() {
        let shape = GridShape::new(1, 3).unwrap();
        let f = GridFunction::from_fn(shape, |x| 2.0 * x[0] + 1.0);
        let mid = (shape.node(2)[0] + shape.node(3)[0]) / 2.0;
        let v = f.evaluate_at(&[mid], EvalMode::Interpolate).unwrap()[0];
        assert!((v - (f.values()[2] + f.values()[3]) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_points_outside_the_cube() {
        let f = GridFunction::zeros(GridShape::new(1, 2).unwrap());
        assert!(matches!(f.evaluate_at(&[1.2], EvalMode::Nearest), Err(Error::Domain(_))));
        assert!(matches!(f.evaluate_at(&[-0.1], EvalMode::Interpolate), Err(Error::Domain(_))));
    }

    #[test]
    fn shape_inference() {
        assert_eq!(GridShape::from_len(2, 1024).unwrap(), GridShape::new(2, 5).unwrap());
        assert!(GridShape::from_len(1, 1000).is_err());
        assert!(GridShape::from_len(2, 512).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let shape = GridShape::new(2, 2).unwrap();
        let f = GridFunction::from_fn(shape, |x| x[0] * 0.1 + x[1]);
        let text = f.to_csv();
        assert!(text.starts_with("# d=2 J=2\n"));
        assert_eq!(GridFunction::from_csv(&text).unwrap(), f);
    }

    #[test]
    fn probability_range_is_enforced() {
        let shape = GridShape::new(1, 1).unwrap();
        assert!(GridFunction::probability(shape, vec![0.2, 1.0]).is_ok());
        assert!(GridFunction::probability(shape, vec![0.2, 1.5]).is_err());
    }
}
