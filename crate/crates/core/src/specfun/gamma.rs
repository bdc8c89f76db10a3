//! Log-gamma via the Lanczos approximation, plus the digamma function.

use std::f64::consts::PI;

use crate::error::{domain, Result};

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite positive argument, got {x}"));
    }
    Ok(ln_gamma_abs(x))
}

/// `ln |Γ(x)|` for any non-pole real `x`, using reflection below 1/2.
pub(crate) fn ln_gamma_abs(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin().abs();
        return (PI / s).ln() - ln_gamma_abs(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Sign of `Γ(x)` for a non-pole real argument.
pub(crate) fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 || (x.floor() as i64) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Γ(x)` for moderate non-pole arguments.
pub(crate) fn gamma(x: f64) -> f64 {
    gamma_sign(x) * ln_gamma_abs(x).exp()
}

/// Digamma `ψ(x)` for `x > 0`.
pub(crate) fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut shift = 0.0;
    while x < 12.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let tail = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    shift + x.ln() - 0.5 / x - tail
}
