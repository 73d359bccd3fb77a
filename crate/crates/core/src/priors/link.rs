//! The logistic link `H(t) = e^t / (1 + e^t)`.

use crate::error::{Error, Result};
use crate::wavelet::GridFunction;

#[inline]
pub fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^t)` without overflow.
#[inline]
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// `ln H(t)`.
#[inline]
pub fn log_logistic(t: f64) -> f64 {
    -softplus(-t)
}

/// Inverse of the link on `(0, 1)`.
pub fn logit(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("logit needs p in (0,1), got {p}")));
    }
    Ok(if p < 0.5 { (p / (1.0 - p)).ln() } else { -((1.0 - p) / p).ln() })
}

pub fn link(w: &GridFunction) -> GridFunction {
    let values = w.values().iter().map(|&t| logistic(t)).collect();
    GridFunction::probability(w.shape(), values).expect("logistic values lie in [0,1]")
}

pub fn link_inverse(p: &GridFunction) -> Result<GridFunction> {
    let values = p.values().iter().map(|&v| logit(v)).collect::<Result<Vec<_>>>()?;
    GridFunction::new(p.shape(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::GridShape;

    #[test]
    fn basic_identities() {
        assert_eq!(logistic(0.0), 0.5);
        for t in [-40.0, -3.0, -0.1, 0.7, 5.0, 35.0] {
            assert!((logistic(t) + logistic(-t) - 1.0).abs() < 1e-15);
            assert!((log_logistic(t) - logistic(t).ln()).abs() < 1e-12);
        }
        assert!(log_logistic(-800.0).is_finite());
        assert_eq!(softplus(1000.0), 1000.0);
    }

    #[test]
    fn grid_round_trip() {
        let shape = GridShape::new(1, 6).unwrap();
        let w = GridFunction::from_fn(shape, |x| 18.0 * x[0] - 9.0);
        let p = link(&w);
        assert!(p.is_probability());
        let back = link_inverse(&p).unwrap();
        for (a, b) in w.values().iter().zip(back.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_probabilities_are_rejected() {
        let shape = GridShape::new(1, 1).unwrap();
        let p = GridFunction::probability(shape, vec![0.0, 0.5]).unwrap();
        assert!(link_inverse(&p).is_err());
        assert!(logit(1.0).is_err());
        assert!(logit(f64::NAN).is_err());
    }
}
