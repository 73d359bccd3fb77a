use crate::error::{Error, Result};

/// Truncated wavelet Besov norm
/// `(sum_l l^{p(alpha/d + 1/2) - 1} |w_l|^p)^{1/p}`, or for `p = inf`
/// `sup_l l^{alpha/d + 1/2} |w_l|`.
pub fn besov_norm(coeffs: &[f64], dim: usize, alpha: f64, p: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    if !(alpha >= 0.0) {
        return Err(Error::domain(format!("regularity {alpha} must be non-negative")));
    }
    if !(p >= 1.0) {
        return Err(Error::domain(format!("integrability {p} must be at least 1")));
    }
    let s = alpha / dim as f64 + 0.5;
    if p.is_infinite() {
        return Ok(coeffs
            .iter()
            .enumerate()
            .map(|(i, w)| ((i + 1) as f64).powf(s) * w.abs())
            .fold(0.0, f64::max));
    }
    let exponent = p * s - 1.0;
    let sum: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, w)| ((i + 1) as f64).powf(exponent) * w.abs().powf(p))
        .sum();
    Ok(sum.powf(p.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_coefficient_has_unit_weight() {
        for alpha in [0.0, 1.0, 3.7] {
            assert_eq!(besov_norm(&[1.0, 0.0, 0.0], 1, alpha, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn two_term_sum() {
        let v = besov_norm(&[1.0, 1.0], 1, 1.0, 1.0).unwrap();
        assert!((v - (1.0 + 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn reduces_to_l2_at_zero_regularity() {
        let w = [0.3, -1.2, 0.5, 2.0];
        let l2 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        for dim in [1, 2] {
            assert!((besov_norm(&w, dim, 0.0, 2.0).unwrap() - l2).abs() < 1e-14);
        }
    }

    #[test]
    fn sup_form() {
        let v = besov_norm(&[0.0, 1.0], 1, 1.0, f64::INFINITY).unwrap();
        assert!((v - 2f64.powf(1.5)).abs() < 1e-14);
    }

    #[test]
    fn rejects_sub_unit_integrability() {
        assert!(matches!(besov_norm(&[1.0], 1, 1.0, 0.5), Err(Error::Domain(_))));
    }
}
