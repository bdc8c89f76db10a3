//! Double-double evaluation of the closed-form curves for small `y`.
//!
//! Near `y = 0` the numerator and denominator are `O(y⁴)` differences of
//! `O(y²)` mass defects, and the margin against `c_loc` is smaller still
//! (about `y⁹`). The mass defects are therefore expanded as power series with
//! rational coefficients, and every step is carried out in double-double
//! arithmetic; no transcendental function is needed.

use twofloat::TwoFloat as Dd;

use super::curves::Curve;

/// Largest `y` routed through this module; beyond it `γ² > 0.44`.
pub(crate) const PRECISE_Y_MAX: f64 = 0.8;

const SERIES_EPS: f64 = 1e-34;
const MAX_TERMS: usize = 2_000;

fn dd(x: f64) -> Dd {
    Dd::from(x)
}

/// `a / b` to full double-double accuracy by three correction steps.
///
/// The crate's own `TwoFloat / TwoFloat` forms its residual without an FMA
/// and is only accurate to about one double.
pub(crate) fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    (dd(q1) + q2) + q3
}

/// `1 − (1−x)^{a/2} ₂F₁(a/2, (a+1)/2; (d+1)/2; x)` with `a = dq/p`, which is
/// `1 − I_q(√x)`.
fn defect_series(d: f64, q: f64, p: f64, x: Dd) -> Dd {
    let half_a = dd(d * q) / (2.0 * p);
    let fa = half_a;
    let fb = half_a + 0.5;
    let fc = dd(0.5 * (d + 1.0));
    let mut binom = vec![dd(1.0)];
    let mut hyper = vec![dd(1.0)];
    let mut xk = dd(1.0);
    let mut sum = dd(0.0);
    let mut small = 0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let prev = binom[k - 1];
        binom.push(prev * (dd(kf - 1.0) - half_a) / kf);
        let prev = hyper[k - 1];
        hyper.push(div(prev * (fa + (kf - 1.0)) * (fb + (kf - 1.0)), (fc + (kf - 1.0)) * kf));
        let mut ck = dd(0.0);
        for j in 0..=k {
            ck += binom[j] * hyper[k - j];
        }
        xk *= x;
        let term = ck * xk;
        sum += term;
        if term.abs().hi() <= SERIES_EPS * sum.abs().hi() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    -sum
}

/// `(1 − X)^r − 1 + rX`, the binomial series without its first two terms.
fn binomial_tail(r: Dd, x: Dd) -> Dd {
    let mut coeff = dd(1.0);
    let mut xk = dd(1.0);
    let mut sum = dd(0.0);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        coeff = coeff * (dd(kf - 1.0) - r) / kf;
        xk *= x;
        if k >= 2 {
            let term = coeff * xk;
            sum += term;
            if term.abs().hi() <= SERIES_EPS * sum.abs().hi().max(f64::MIN_POSITIVE) {
                break;
            }
        }
    }
    sum
}

/// Numerator and denominator in double-double, plus `num − c_loc·den`.
pub(crate) struct PreciseParts {
    pub numerator: Dd,
    pub denominator: Dd,
    pub loc_margin: Dd,
}

/// `p` must be exactly 3 or 4; `0 < y ≤ PRECISE_Y_MAX`.
pub(crate) fn precise_parts(d: usize, p: f64, curve: Curve, y: f64) -> PreciseParts {
    let df = d as f64;
    let yd = dd(y);
    // γ = y/(2 − y) is the mass parameter of m(y); β of m(ŷ).
    let gamma = div(yd, dd(2.0) - yd);
    let yhat = div(yd, dd(1.0) + (dd(1.0) - yd).sqrt());
    let beta = div(yhat, dd(2.0) - yhat);
    let g2 = gamma * gamma;
    let d1 = defect_series(df, 1.0, p, g2);
    let d2 = if p == 4.0 { defect_series(df, 2.0, p, g2) } else { dd(0.0) };
    let d1_half = defect_series(df, 1.0, p, beta * beta);

    let two_bubble_den = -d1 + d1_half * 4.0 - d1_half * d1_half * 2.0;
    let (numerator, denominator) = match curve {
        Curve::TwoBubble if p == 3.0 => {
            // 2 − δ − 2(1 − 3δ/4)^{2/3}; the linear terms cancel.
            let x = d1 * 3.0 / 4.0;
            (binomial_tail(dd(2.0) / 3.0, x) * -2.0, two_bubble_den)
        }
        Curve::TwoBubble => {
            // 2 − δ − 2(1 − X)^{1/2} with X = (4δ + 3δ₂)/8.
            let x = (d1 * 4.0 + d2 * 3.0) / 8.0;
            let linear = (d2 * 3.0 - d1 * 4.0) / 8.0;
            (linear - binomial_tail(dd(0.5), x) * 2.0, two_bubble_den)
        }
        Curve::SignChanging => {
            let inner = d1 * 4.0 - d2 * 3.0;
            let num = dd(2.0) - d1 - inner * dd(0.5).sqrt();
            (num, dd(2.0) - d1)
        }
        Curve::SignChangingDirect => {
            let inner = d1 * 4.0 - d2 * 3.0;
            let inner = if inner.hi() < 0.0 { dd(0.0) } else { inner };
            ((d1 - (inner / 2.0).sqrt()), d1)
        }
    };
    let s = dd(df) * (p - 2.0) / (2.0 * p);
    let c_loc = div(s * 4.0, dd(df + 2.0) + s * 2.0);
    PreciseParts { numerator, denominator, loc_margin: numerator - c_loc * denominator }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{mass_defect_of_y, SobolevContext};

    #[test]
    fn series_defect_matches_f64_route() {
        for (d, p) in [(1usize, 3.0), (1, 4.0), (2, 3.0), (3, 4.0)] {
            let ctx = SobolevContext::for_exponent(d, p).unwrap();
            for y in [1e-3, 0.05, 0.3, 0.8] {
                let g = y / (2.0 - y);
                for q in [1.0, 2.0] {
                    let a = defect_series(d as f64, q, p, dd(g * g)).hi();
                    let b = mass_defect_of_y(&ctx, q, y).unwrap();
                    assert!((a - b).abs() <= 1e-13 * b, "d={d} p={p} q={q} y={y}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn division_is_double_double() {
        let third = div(dd(1.0), dd(3.0));
        assert!((third * 3.0 - 1.0).abs().hi() < 1e-31);
        let a = dd(2.0).sqrt();
        let b = dd(7.0).sqrt();
        assert!((div(a, b) * b - a).abs().hi() < 1e-31);
    }

    #[test]
    fn binomial_tail_small_argument() {
        let x = 1e-3;
        let exact = (1.0f64 - x).powf(2.0 / 3.0) - 1.0 + 2.0 / 3.0 * x;
        let tail = binomial_tail(dd(2.0) / 3.0, dd(x)).hi();
        assert!((tail - exact).abs() < 1e-9 * exact.abs());
        // Leading term r(r−1)/2·x².
        let x = 1e-12;
        let tail = binomial_tail(dd(0.5), dd(x)).hi();
        assert!((tail / (-0.125 * x * x) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn margin_reference_values() {
        // 80-digit references for d = 1, p = 3.
        for (y, num, den, margin) in [
            (1e-3, 2.416_094_7e-17, 1.208_047_4e-16, 3.161_986_6e-34),
            (5e-3, 1.522_217_8e-14, 7.611_089_2e-14, 1.255_121_3e-28),
            (0.2, 5.971_480_8e-8, 2.985_740_3e-7, 1.931_215_4e-15),
        ] {
            let parts = precise_parts(1, 3.0, Curve::TwoBubble, y);
            assert!((parts.numerator.hi() / num - 1.0).abs() < 1e-7);
            assert!((parts.denominator.hi() / den - 1.0).abs() < 1e-7);
            assert!((parts.loc_margin.hi() / margin - 1.0).abs() < 1e-6, "y={y}: {}", parts.loc_margin.hi());
        }
    }
}
