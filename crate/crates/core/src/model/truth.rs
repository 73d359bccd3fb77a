//! Synthetic ground-truth classification surfaces.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::priors::std_normal_cdf;
use crate::wavelet::{GridFunction, GridShape};

const SKEW_LOCATION: [f64; 2] = [0.4, 0.6];
const SKEW_VARIANCE: f64 = 0.05;
const SKEW_SHAPE: [f64; 2] = [3.0, -2.0];
const BLOCK_LOW: [f64; 2] = [0.1, 0.1];
const BLOCK_HIGH: [f64; 2] = [0.5, 0.5];
const BLOCK_HEIGHT: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub enum GroundTruth {
    /// `1 / (1 + exp(-(9x - 5)))`.
    Sigmoid1D,
    /// 0.9 on `[0, 0.4)`, 0.2 on `[0.4, 0.7)`, 0.5 on `[0.7, 1]`.
    Step1D,
    /// A quarter of the bivariate skew-normal density with location
    /// `(0.4, 0.6)`, covariance `0.05 I` and shape `(3, -2)`, clipped to `[0, 1]`.
    SkewNormal2D,
    /// Height 0.4 on the square `[0.1, 0.5]^2`, zero elsewhere.
    ///
    /// With `literal` set, each factor `(1 + sgn)(1 - sgn)` is left
    /// unnormalised, which gives 6.4 inside the block; such values are
    /// rejected by [`GroundTruth::eval`] and only reachable through
    /// [`GroundTruth::raw_value`].
    Block2D { literal: bool },
    /// Nearest-node lookup into a user grid.
    Custom(GridFunction),
}

impl GroundTruth {
    pub fn block2d() -> Self {
        GroundTruth::Block2D { literal: false }
    }

    pub fn dim(&self) -> usize {
        match self {
            GroundTruth::Sigmoid1D | GroundTruth::Step1D => 1,
            GroundTruth::SkewNormal2D | GroundTruth::Block2D { .. } => 2,
            GroundTruth::Custom(g) => g.dim(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GroundTruth::Sigmoid1D => "sigmoid1d",
            GroundTruth::Step1D => "step1d",
            GroundTruth::SkewNormal2D => "skewnormal2d",
            GroundTruth::Block2D { literal: false } => "block2d",
            GroundTruth::Block2D { literal: true } => "block2d-literal",
            GroundTruth::Custom(_) => "custom",
        }
    }

    /// Stable small integer used for seed mixing.
    pub fn id(&self) -> u64 {
        match self {
            GroundTruth::Sigmoid1D => 1,
            GroundTruth::Step1D => 2,
            GroundTruth::SkewNormal2D => 3,
            GroundTruth::Block2D { literal: false } => 4,
            GroundTruth::Block2D { literal: true } => 5,
            GroundTruth::Custom(_) => 6,
        }
    }

    /// The defining formula at `x`, without any range check.
    pub fn raw_value(&self, x: &[f64]) -> f64 {
        match self {
            GroundTruth::Sigmoid1D => 1.0 / (1.0 + (-(9.0 * x[0] - 5.0)).exp()),
            GroundTruth::Step1D => match x[0] {
                t if t < 0.4 => 0.9,
                t if t < 0.7 => 0.2,
                _ => 0.5,
            },
            GroundTruth::SkewNormal2D => (0.25 * skew_normal_density(x)).min(1.0),
            GroundTruth::Block2D { literal } => {
                let factor = |t: f64| if *literal { t } else { 0.5 * t };
                (0..2)
                    .map(|h| {
                        factor(1.0 + sign(x[h] - BLOCK_LOW[h])) * factor(1.0 - sign(x[h] - BLOCK_HIGH[h]))
                    })
                    .product::<f64>()
                    * BLOCK_HEIGHT
            }
            GroundTruth::Custom(g) => {
                let i = g.shape().nearest(x).expect("point checked by caller");
                g.values()[i]
            }
        }
    }

    /// Probability at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::config(format!(
                "{} is {}-dimensional, got a point with {} coordinates",
                self.name(),
                self.dim(),
                x.len()
            )));
        }
        if x.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::domain(format!("point {x:?} lies outside the unit cube")));
        }
        let p = self.raw_value(x);
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("{} evaluates to {p} at {x:?}, not a probability", self.name())));
        }
        Ok(p)
    }

    /// The truth sampled at the nodes of `shape`.
    pub fn on_grid(&self, shape: GridShape) -> Result<GridFunction> {
        if shape.dim() != self.dim() {
            return Err(Error::config(format!(
                "{} is {}-dimensional, grid is {}-dimensional",
                self.name(),
                self.dim(),
                shape.dim()
            )));
        }
        let nodes = shape.nodes();
        let values = nodes
            .chunks(shape.dim())
            .map(|x| self.eval(x))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::probability(shape, values)
    }
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroundTruth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid1d" => Ok(GroundTruth::Sigmoid1D),
            "step1d" => Ok(GroundTruth::Step1D),
            "skewnormal2d" => Ok(GroundTruth::SkewNormal2D),
            "block2d" => Ok(GroundTruth::block2d()),
            "block2d-literal" => Ok(GroundTruth::Block2D { literal: true }),
            other => Err(Error::parse("ground truth", other)),
        }
    }
}

/// `p_0(x)` for every supported kind.
pub fn truth_eval(truth: &GroundTruth, x: &[f64]) -> Result<f64> {
    truth.eval(x)
}

fn sign(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn skew_normal_density(x: &[f64]) -> f64 {
    let z = [x[0] - SKEW_LOCATION[0], x[1] - SKEW_LOCATION[1]];
    let quad = (z[0] * z[0] + z[1] * z[1]) / SKEW_VARIANCE;
    let phi2 = (-0.5 * quad).exp() / (2.0 * PI * SKEW_VARIANCE);
    let omega = SKEW_VARIANCE.sqrt();
    let slant = (SKEW_SHAPE[0] * z[0] + SKEW_SHAPE[1] * z[1]) / omega;
    2.0 * phi2 * std_normal_cdf(slant)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        assert_eq!(GroundTruth::Sigmoid1D.eval(&[5.0 / 9.0]).unwrap(), 0.5);
        let step = GroundTruth::Step1D;
        assert_eq!(step.eval(&[0.2]).unwrap(), 0.9);
        assert_eq!(step.eval(&[0.5]).unwrap(), 0.2);
        assert_eq!(step.eval(&[0.9]).unwrap(), 0.5);
        assert_eq!(step.eval(&[0.4]).unwrap(), 0.2);
        assert_eq!(step.eval(&[0.7]).unwrap(), 0.5);
        let block = GroundTruth::block2d();
        assert!((block.eval(&[0.3, 0.3]).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(block.eval(&[0.7, 0.7]).unwrap(), 0.0);
        assert_eq!(block.eval(&[0.3, 0.7]).unwrap(), 0.0);
    }

    #[test]
    fn literal_block_is_not_a_probability() {
        let literal = GroundTruth::Block2D { literal: true };
        assert!((literal.raw_value(&[0.3, 0.3]) - 6.4).abs() < 1e-12);
        assert!(literal.eval(&[0.3, 0.3]).is_err());
        assert_eq!(literal.eval(&[0.9, 0.9]).unwrap(), 0.0);
    }

    #[test]
    fn skew_normal_peak_is_clipped() {
        let t = GroundTruth::SkewNormal2D;
        let g = t.on_grid(GridShape::new(2, 7).unwrap()).unwrap();
        let max = g.values().iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(g.values().iter().all(|v| (0.0..=1.0).contains(v)));
        // the skew pushes mass away from this corner
        assert!(t.eval(&[0.0, 1.0]).unwrap() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(GroundTruth::Step1D.eval(&[0.1, 0.2]), Err(Error::Config(_))));
        assert!(matches!(GroundTruth::block2d().eval(&[0.1]), Err(Error::Config(_))));
        assert!(GroundTruth::Sigmoid1D.eval(&[1.5]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for t in [
            GroundTruth::Sigmoid1D,
            GroundTruth::Step1D,
            GroundTruth::SkewNormal2D,
            GroundTruth::block2d(),
            GroundTruth::Block2D { literal: true },
        ] {
            assert_eq!(t.name().parse::<GroundTruth>().unwrap(), t);
        }
        assert!("sigmoid".parse::<GroundTruth>().is_err());
    }
}
