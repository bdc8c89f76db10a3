//! Gegenbauer (ultraspherical) polynomials by their three-term recurrence.

use std::f64::consts::PI;

use super::gamma::ln_gamma_abs;

/// `C_ℓ^λ(t)` for `λ > 0`.
///
/// For the circle (`λ = 0`) use [`chebyshev`]; the Gegenbauer family
/// degenerates there.
pub fn gegenbauer(ell: usize, lambda: f64, t: f64) -> f64 {
    assert!(lambda > 0.0, "gegenbauer index must be positive, got {lambda}");
    let mut prev = 1.0;
    if ell == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * t;
    for k in 1..ell {
        let k = k as f64;
        let next = (2.0 * (k + lambda) * t * cur - (k + 2.0 * lambda - 1.0) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// All of `C_0^λ(t), …, C_L^λ(t)` written into `out` (`out.len() = L + 1`).
pub fn gegenbauer_all(lambda: f64, t: f64, out: &mut [f64]) {
    assert!(lambda > 0.0);
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = 2.0 * lambda * t;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] =
            (2.0 * (kf + lambda) * t * out[k] - (kf + 2.0 * lambda - 1.0) * out[k - 1]) / (kf + 1.0);
    }
}

/// Chebyshev `T_ℓ(t) = cos(ℓθ)` for `t = cos θ`.
pub fn chebyshev(ell: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if ell == 0 {
        return prev;
    }
    let mut cur = t;
    for _ in 1..ell {
        let next = 2.0 * t * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `∫_{-1}^{1} (C_ℓ^λ)² (1 − t²)^{λ − 1/2} dt`.
pub fn gegenbauer_norm_sq(ell: usize, lambda: f64) -> f64 {
    let l = ell as f64;
    let log = PI.ln() + (1.0 - 2.0 * lambda) * std::f64::consts::LN_2 + ln_gamma_abs(l + 2.0 * lambda)
        - ln_gamma_abs(l + 1.0)
        - (l + lambda).ln()
        - 2.0 * ln_gamma_abs(lambda);
    log.exp()
}
