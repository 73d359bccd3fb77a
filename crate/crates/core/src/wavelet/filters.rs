//! Scaling (low-pass) filters for the supported families.

use std::f64::consts::FRAC_1_SQRT_2;

pub(crate) const HAAR: [f64; 2] = [FRAC_1_SQRT_2, FRAC_1_SQRT_2];

/// Least-asymmetric Daubechies filter with 8 vanishing moments (16 taps),
/// reconstruction orientation.
pub(crate) const SYMMLET8: [f64; 16] = [
    0.0018899503327594609,
    -0.0003029205147213668,
    -0.01495225833704823,
    0.003808752013890615,
    0.049137179673607506,
    -0.027219029917056003,
    -0.05194583810770904,
    0.3644418948353314,
    0.7771857517005235,
    0.4813596512583722,
    -0.061273359067658524,
    -0.1432942383508097,
    0.007607487324917605,
    0.03169508781149298,
    -0.0005421323317911481,
    -0.0033824159510061256,
];

/// Quadrature-mirror high-pass filter `g[k] = (-1)^k h[T-1-k]`.
pub(crate) fn highpass(lo: &[f64]) -> Vec<f64> {
    let t = lo.len();
    (0..t)
        .map(|k| if k % 2 == 0 { lo[t - 1 - k] } else { -lo[t - 1 - k] })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_orthonormal(h: &[f64]) {
        let sum: f64 = h.iter().sum();
        assert!((sum - std::f64::consts::SQRT_2).abs() < 1e-12);
        // <h, h shifted by 2m> = delta_m
        for m in 0..h.len() / 2 {
            let dot: f64 = (0..h.len() - 2 * m).map(|i| h[i] * h[i + 2 * m]).sum();
            let target = if m == 0 { 1.0 } else { 0.0 };
            assert!((dot - target).abs() < 1e-12, "shift {m}: {dot}");
        }
        let g = highpass(h);
        let cross: f64 = h.iter().zip(&g).map(|(a, b)| a * b).sum();
        assert!(cross.abs() < 1e-15);
    }

    #[test]
    fn filters_are_orthonormal() {
        check_orthonormal(&HAAR);
        check_orthonormal(&SYMMLET8);
    }

    #[test]
    fn symmlet_has_vanishing_moments() {
        let g = highpass(&SYMMLET8);
        for p in 0..4 {
            let m: f64 = g.iter().enumerate().map(|(k, v)| (k as f64).powi(p) * v).sum();
            assert!(m.abs() < 1e-6 * 16f64.powi(p), "moment {p}: {m}");
        }
    }
}
