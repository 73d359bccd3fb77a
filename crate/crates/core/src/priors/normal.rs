//! Standard normal CDF and the log two-sided tail used by the whitening map.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

/// Above this |w| the tail is evaluated through a continued fraction for
/// `log erfc` instead of `erfc` itself.
const TAIL_SWITCH: f64 = 6.0;

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `ln erfc(z)` for `z >= 0`, using
/// `erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))`
/// once `erfc` would lose relative precision.
fn ln_erfc(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z <= TAIL_SWITCH * FRAC_1_SQRT_2 {
        return erfc(z).ln();
    }
    let mut t = z;
    for k in (1..=60).rev() {
        t = z + 0.5 * k as f64 / t;
    }
    -z * z - 0.5 * PI.ln() - t.ln()
}

/// `-ln(2 - 2 Phi(|w|))`: sends `|W|`, `W ~ N(0,1)`, to a standard
/// exponential variable. Finite for every finite `w`.
#[inline]
pub fn neg_log_two_sided_tail(w: f64) -> f64 {
    -ln_erfc(w.abs() * FRAC_1_SQRT_2)
}
