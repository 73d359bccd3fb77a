//! The `n`-dependent hyper-prior on the smoothness, with density
//! proportional to `exp(-n^{d/(2 alpha + d)})` on `(d, ln n]`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};

/// Relative tolerance of the normalising quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothnessHyperPrior {
    n: usize,
    dim: usize,
    zeta: f64,
}

fn unnormalized(alpha: f64, ln_n: f64, d: f64) -> f64 {
    (-(d * ln_n / (2.0 * alpha + d)).exp()).exp()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    // crude magnitude estimate to turn the relative tolerance absolute
    let scale = (0..=64)
        .map(|i| f(a + (b - a) * i as f64 / 64.0).abs())
        .sum::<f64>()
        * (b - a)
        / 65.0;
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    adaptive(&f, a, b, fa, fm, fb, whole, tol, 48)
}

fn cache() -> &'static RwLock<HashMap<(usize, usize), f64>> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The normalising constant `zeta_n`, computed once per `(n, d)`.
pub fn hyperprior_normalizer(n: usize, dim: usize) -> Result<f64> {
    check_support(n, dim)?;
    if let Some(&z) = cache().read().expect("normalizer cache poisoned").get(&(n, dim)) {
        return Ok(z);
    }
    let (ln_n, d) = ((n as f64).ln(), dim as f64);
    let z = adaptive_simpson(|a| unnormalized(a, ln_n, d), d, ln_n, QUADRATURE_TOLERANCE);
    let mut guard = cache().write().expect("normalizer cache poisoned");
    Ok(*guard.entry((n, dim)).or_insert(z))
}

fn check_support(n: usize, dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::config("dimension must be positive"));
    }
    if !((n as f64).ln() > dim as f64) {
        return Err(Error::domain(format!(
            "smoothness support (d, ln n] is empty for n = {n}, d = {dim}"
        )));
    }
    Ok(())
}

impl SmoothnessHyperPrior {
    pub fn new(n: usize, dim: usize) -> Result<Self> {
        let zeta = hyperprior_normalizer(n, dim)?;
        Ok(SmoothnessHyperPrior { n, dim, zeta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// `(lower, upper)` with the lower end excluded.
    pub fn support(&self) -> (f64, f64) {
        (self.dim as f64, (self.n as f64).ln())
    }

    pub fn contains(&self, alpha: f64) -> bool {
        let (lo, hi) = self.support();
        alpha > lo && alpha <= hi
    }

    /// Log density without the normaliser; `-inf` off the support.
    pub fn log_unnormalized(&self, alpha: f64) -> f64 {
        if !self.contains(alpha) {
            return f64::NEG_INFINITY;
        }
        let d = self.dim as f64;
        -(d * (self.n as f64).ln() / (2.0 * alpha + d)).exp()
    }

    pub fn log_density(&self, alpha: f64) -> f64 {
        self.log_unnormalized(alpha) - self.zeta.ln()
    }

    pub fn density(&self, alpha: f64) -> f64 {
        self.log_density(alpha).exp()
    }

    /// Distribution function by quadrature from the lower end.
    pub fn cdf(&self, alpha: f64) -> f64 {
        let (lo, hi) = self.support();
        if alpha <= lo {
            return 0.0;
        }
        if alpha >= hi {
            return 1.0;
        }
        let ln_n = (self.n as f64).ln();
        let d = self.dim as f64;
        let mass = adaptive_simpson(|a| unnormalized(a, ln_n, d), lo, alpha, QUADRATURE_TOLERANCE);
        (mass / self.zeta).clamp(0.0, 1.0)
    }
}

/// `ln sigma_n(alpha)`; `-inf` off the support.
pub fn hyperprior_logdensity(alpha: f64, hp: &SmoothnessHyperPrior) -> f64 {
    hp.log_density(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_support_is_rejected() {
        assert!(SmoothnessHyperPrior::new(2, 1).is_err());
        assert!(SmoothnessHyperPrior::new(7, 2).is_err());
        assert!(SmoothnessHyperPrior::new(3, 1).is_ok());
    }

    #[test]
    fn normalizer_reference_values() {
        for (n, d, z) in [
            (200, 1, 0.49970),
            (1000, 1, 0.62082),
            (5000, 1, 0.74192),
            (200, 2, 0.15122),
            (1000, 2, 0.16920),
            (5000, 2, 0.18792),
        ] {
            let got = hyperprior_normalizer(n, d).unwrap();
            assert!((got - z).abs() < 1e-5, "n={n} d={d}: {got}");
        }
    }

    #[test]
    fn endpoint_ratio() {
        let n = 1000usize;
        let hp = SmoothnessHyperPrior::new(n, 1).unwrap();
        let ln_n = (n as f64).ln();
        let eps = 1e-9;
        let ratio = (hp.log_density(ln_n) - hp.log_density(1.0 + eps)).exp();
        let expected = ((n as f64).powf(1.0 / 3.0) - (n as f64).powf(1.0 / (2.0 * ln_n + 1.0))).exp();
        assert!((ratio / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn outside_support_is_neg_infinity() {
        let hp = SmoothnessHyperPrior::new(200, 1).unwrap();
        assert_eq!(hp.log_density(1.0), f64::NEG_INFINITY);
        assert_eq!(hp.log_density(0.5), f64::NEG_INFINITY);
        assert_eq!(hp.log_density(6.0), f64::NEG_INFINITY);
        assert!(hp.log_density(200f64.ln()).is_finite());
    }

    #[test]
    fn cdf_ends() {
        let hp = SmoothnessHyperPrior::new(5000, 2).unwrap();
        let (lo, hi) = hp.support();
        assert_eq!(hp.cdf(lo), 0.0);
        assert_eq!(hp.cdf(hi), 1.0);
        assert!((hp.cdf(hi - 1e-12) - 1.0).abs() < 1e-7);
    }

    #[test]
    fn simpson_on_polynomial_and_exponential() {
        let v = adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
        let e = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-10);
        assert!((e - (1f64.exp() - 1.0)).abs() < 1e-9);
    }
}
