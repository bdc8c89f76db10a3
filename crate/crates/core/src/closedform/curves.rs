use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::precise::{div, precise_parts, PRECISE_Y_MAX};
use crate::conformal::{beta_of_y, m_q_near_one, mass_defect_of_y, SobolevContext};
use crate::error::{domain, usage, Result};

/// Denominators below this magnitude mark a point as degenerate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-10;

/// One point of a quotient curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub y: f64,
    pub beta: f64,
    pub value: f64,
    pub numerator: f64,
    pub denominator: f64,
    /// `numerator − c_loc·denominator`, evaluated without cancellation.
    pub loc_margin: f64,
    /// The denominator is too small for `value` to be trusted.
    pub degenerate: bool,
}

impl CurvePoint {
    fn new(ctx: &SobolevContext, y: f64, numerator: f64, denominator: f64) -> Self {
        Self {
            y,
            beta: beta_of_y(y),
            value: numerator / denominator,
            numerator,
            denominator,
            loc_margin: numerator - ctx.c_loc() * denominator,
            degenerate: denominator.abs() < DEGENERATE_DENOMINATOR,
        }
    }

    /// `numerator − c·denominator`, positive iff `value > c` (for a positive denominator).
    pub fn margin(&self, c: f64) -> f64 {
        self.numerator - c * self.denominator
    }
}

/// The closed-form curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Curve {
    /// `ℰ̃(v_β + v_{−β})`: `e(y)` for `p = 3`, `f(y)` for `p = 4`.
    TwoBubble,
    /// The sign-changing curve `g(y)` for `p = 4` as displayed in the literature:
    /// `(1 + m − 2^{−1/2}(1 − 4m + 3m₂))/(1 + m)`.
    SignChanging,
    /// `ℰ̃(v_β − v_{−β})` for `p = 4` derived from the spectral identities:
    /// `1 − 2^{−1/2} √(1 − 4m + 3m₂)/(1 − m)`.
    SignChangingDirect,
}

/// Mass defects entering a curve at one `y`.
struct Defects {
    /// `1 − m(y)`
    d1: f64,
    /// `1 − m₂(y)`, only for `p = 4`
    d2: f64,
    /// `1 − m(1 − √(1−y))`
    d1_half: f64,
}

fn assemble(ctx: &SobolevContext, curve: Curve, y: f64, k: &Defects) -> CurvePoint {
    let Defects { d1, d2, d1_half } = *k;
    // 1 + m(y) − 2 m(ŷ)² with m = 1 − δ.
    let two_bubble_den = -d1 + 4.0 * d1_half - 2.0 * d1_half * d1_half;
    match curve {
        Curve::TwoBubble if ctx.has_exponent(3.0) => {
            // 1 + m − 2^{−1/3}(1 + 3m)^{2/3} = 2 − δ − 2(1 − 3δ/4)^{2/3}
            let num = -d1 - 2.0 * ((2.0 / 3.0) * (-0.75 * d1).ln_1p()).exp_m1();
            CurvePoint::new(ctx, y, num, two_bubble_den)
        }
        Curve::TwoBubble => {
            // 1 + m − 2^{−1/2}(1 + 4m + 3m₂)^{1/2} = 2 − δ − 2(1 − (4δ + 3δ₂)/8)^{1/2}
            let num = -d1 - 2.0 * (0.5 * (-(4.0 * d1 + 3.0 * d2) / 8.0).ln_1p()).exp_m1();
            CurvePoint::new(ctx, y, num, two_bubble_den)
        }
        Curve::SignChanging => {
            let num = 2.0 - d1 - FRAC_1_SQRT_2 * (4.0 * d1 - 3.0 * d2);
            CurvePoint::new(ctx, y, num, 2.0 - d1)
        }
        Curve::SignChangingDirect => {
            let inner = (4.0 * d1 - 3.0 * d2).max(0.0);
            let num = d1 - FRAC_1_SQRT_2 * inner.sqrt();
            CurvePoint::new(ctx, y, num, d1)
        }
    }
}

fn check_curve(ctx: &SobolevContext, curve: Curve) -> Result<()> {
    match curve {
        Curve::TwoBubble if ctx.has_exponent(3.0) || ctx.has_exponent(4.0) => Ok(()),
        Curve::TwoBubble => usage(format!(
            "closed-form two-bubble curve needs p = 3 or p = 4, got p = {}",
            ctx.p()
        )),
        _ if ctx.has_exponent(4.0) => Ok(()),
        _ => usage(format!("sign-changing curve needs p = 4, got p = {}", ctx.p())),
    }
}

/// Evaluate `curve` at `y ∈ (0, 1)`.
pub fn curve_point(ctx: &SobolevContext, curve: Curve, y: f64) -> Result<CurvePoint> {
    check_curve(ctx, curve)?;
    if !(y > 0.0 && y < 1.0) {
        return domain(format!("curve parameter y must lie in (0, 1), got {y}"));
    }
    if y <= PRECISE_Y_MAX {
        let p = ctx.p().round();
        let parts = precise_parts(ctx.d(), p, curve, y);
        let mut pt = CurvePoint::new(ctx, y, parts.numerator.hi(), parts.denominator.hi());
        pt.value = div(parts.numerator, parts.denominator).hi();
        pt.loc_margin = parts.loc_margin.hi();
        return Ok(pt);
    }
    let d2 = if ctx.has_exponent(4.0) { mass_defect_of_y(ctx, 2.0, y)? } else { 0.0 };
    let yh = y / (1.0 + (1.0 - y).sqrt());
    let defects = Defects {
        d1: mass_defect_of_y(ctx, 1.0, y)?,
        d2,
        d1_half: mass_defect_of_y(ctx, 1.0, yh)?,
    };
    Ok(assemble(ctx, curve, y, &defects))
}

/// Evaluate `curve` at `y = 1 − w` for small `w ∈ (0, 1/2]`, with the mass
/// integrals taken from the connection formulas at `z = 1`.
///
/// `w` may be far below machine epsilon relative to one; the reported `y`
/// then rounds to `1`.
pub fn curve_near_one(ctx: &SobolevContext, curve: Curve, w: f64) -> Result<CurvePoint> {
    check_curve(ctx, curve)?;
    let d2 = if ctx.has_exponent(4.0) { 1.0 - m_q_near_one(ctx, 2.0, w)? } else { 0.0 };
    let defects = Defects {
        d1: 1.0 - m_q_near_one(ctx, 1.0, w)?,
        d2,
        d1_half: 1.0 - m_q_near_one(ctx, 1.0, w.sqrt())?,
    };
    Ok(assemble(ctx, curve, 1.0 - w, &defects))
}

/// The analytic value at `y = 1`, obtained from `m(1) = m₂(1) = 0`:
/// `1 − 2^{−1/3}` for `e`, `1 − 2^{−1/2}` for `f` and both forms of `g`.
pub fn curve_limit_at_one(ctx: &SobolevContext, curve: Curve) -> Result<f64> {
    check_curve(ctx, curve)?;
    let full = Defects { d1: 1.0, d2: 1.0, d1_half: 1.0 };
    Ok(assemble(ctx, curve, 1.0, &full).value)
}

/// `e(y)` for `p = 3`.
pub fn quotient_p3(ctx: &SobolevContext, y: f64) -> Result<CurvePoint> {
    if !ctx.has_exponent(3.0) {
        return usage(format!("quotient_p3 needs p = 3, got p = {}", ctx.p()));
    }
    curve_point(ctx, Curve::TwoBubble, y)
}

/// `f(y)` for `p = 4`.
pub fn quotient_p4(ctx: &SobolevContext, y: f64) -> Result<CurvePoint> {
    if !ctx.has_exponent(4.0) {
        return usage(format!("quotient_p4 needs p = 4, got p = {}", ctx.p()));
    }
    curve_point(ctx, Curve::TwoBubble, y)
}

/// `g(y)` for `p = 4`, displayed form.
pub fn quotient_p4_signchanging(ctx: &SobolevContext, y: f64) -> Result<CurvePoint> {
    curve_point(ctx, Curve::SignChanging, y)
}

/// `ℰ̃(v_β − v_{−β})` for `p = 4`.
pub fn quotient_p4_signchanging_direct(ctx: &SobolevContext, y: f64) -> Result<CurvePoint> {
    curve_point(ctx, Curve::SignChangingDirect, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{m2_of_y, m_of_y, two_bubble_limit};

    fn ctx(d: usize, s: f64) -> SobolevContext {
        SobolevContext::new(d, s).unwrap()
    }

    fn grid() -> Vec<f64> {
        (1..200).map(|k| k as f64 * 0.005).collect()
    }

    #[test]
    fn defect_form_matches_displayed_formulas() {
        let c3 = ctx(1, 1.0 / 6.0);
        let c4 = ctx(1, 0.25);
        for y in [0.2, 0.5, 0.9] {
            let m = m_of_y(&c3, y).unwrap();
            let mh = m_of_y(&c3, 1.0 - (1.0 - y).sqrt()).unwrap();
            let e1 = 1.0 + m - 2f64.powf(-1.0 / 3.0) * (1.0 + 3.0 * m).powf(2.0 / 3.0);
            let e2 = 1.0 + m - 2.0 * mh * mh;
            let pt = quotient_p3(&c3, y).unwrap();
            assert!((pt.numerator - e1).abs() < 1e-14 && (pt.denominator - e2).abs() < 1e-14);

            let m = m_of_y(&c4, y).unwrap();
            let m2 = m2_of_y(&c4, y).unwrap();
            let mh = m_of_y(&c4, 1.0 - (1.0 - y).sqrt()).unwrap();
            let f = (1.0 + m - FRAC_1_SQRT_2 * (1.0 + 4.0 * m + 3.0 * m2).sqrt())
                / (1.0 + m - 2.0 * mh * mh);
            // The direct f64 formula loses about ε/denominator to cancellation.
            assert!((quotient_p4(&c4, y).unwrap().value - f).abs() < 1e-8);
            let g = (1.0 + m - FRAC_1_SQRT_2 * (1.0 - 4.0 * m + 3.0 * m2)) / (1.0 + m);
            assert!((quotient_p4_signchanging(&c4, y).unwrap().value - g).abs() < 1e-13);
        }
    }

    #[test]
    fn small_y_limits() {
        // Richardson on y ∈ {1e−2, 1e−3, 1e−4}: the curves are smooth in y.
        for (s, target) in [(1.0 / 6.0, 0.2), (0.25, 2.0 / 7.0)] {
            let c = ctx(1, s);
            let v: Vec<f64> = [1e-2, 1e-3, 1e-4]
                .iter()
                .map(|&y| curve_point(&c, Curve::TwoBubble, y).unwrap().value)
                .collect();
            let extrap = v[2] - (v[1] - v[2]) / 9.0;
            assert!((extrap - target).abs() < 1e-4, "s={s}: {extrap}");
        }
        let c = ctx(1, 0.25);
        let g = quotient_p4_signchanging(&c, 1e-4).unwrap();
        assert!((g.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn wrong_exponent_is_usage_error() {
        let c = ctx(1, 0.25);
        assert!(matches!(quotient_p3(&c, 0.5), Err(crate::Error::Usage(_))));
        let c = ctx(1, 1.0 / 6.0);
        assert!(matches!(quotient_p4(&c, 0.5), Err(crate::Error::Usage(_))));
        assert!(matches!(quotient_p4_signchanging(&c, 0.5), Err(crate::Error::Usage(_))));
        assert!(quotient_p3(&c, 0.0).is_err());
        assert!(quotient_p3(&c, 1.0).is_err());
    }

    #[test]
    fn value_times_denominator() {
        let c = ctx(1, 0.25);
        for y in grid() {
            for curve in [Curve::TwoBubble, Curve::SignChanging, Curve::SignChangingDirect] {
                let pt = curve_point(&c, curve, y).unwrap();
                if !pt.degenerate {
                    assert!((pt.value * pt.denominator - pt.numerator).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn figure_shapes() {
        let e1: Vec<f64> = grid().iter().map(|&y| quotient_p3(&ctx(1, 1.0 / 6.0), y).unwrap().value).collect();
        assert!(e1.iter().all(|&v| v > 0.2));
        assert!(e1[1..].windows(2).all(|w| w[1] > w[0] - 1e-12));
        let c2 = SobolevContext::for_exponent(2, 3.0).unwrap();
        let e2: Vec<f64> = grid().iter().map(|&y| quotient_p3(&c2, y).unwrap().value).collect();
        assert!(e2.iter().all(|&v| v < 2.0 / 7.0));
        assert!(e2[1..].windows(2).all(|w| w[1] < w[0] + 1e-12));
        let c4 = ctx(1, 0.25);
        let f: Vec<f64> = grid().iter().map(|&y| quotient_p4(&c4, y).unwrap().value).collect();
        assert!(f.iter().all(|&v| v > 2.0 / 7.0));
        assert!(f[1..].windows(2).all(|w| w[1] > w[0] - 1e-12));
        for curve in [Curve::SignChanging, Curve::SignChangingDirect] {
            let g: Vec<f64> = grid().iter().map(|&y| curve_point(&c4, curve, y).unwrap().value).collect();
            assert!(g.iter().all(|&v| v > 1.0 - FRAC_1_SQRT_2));
            assert!(g[1..].windows(2).all(|w| w[1] < w[0] + 1e-12));
        }
    }

    #[test]
    fn limits_at_one() {
        let c3 = ctx(1, 1.0 / 6.0);
        let c4 = ctx(1, 0.25);
        let e = curve_limit_at_one(&c3, Curve::TwoBubble).unwrap();
        assert!((e - (1.0 - 2f64.powf(-1.0 / 3.0))).abs() < 1e-15);
        assert!((e - 0.5 * two_bubble_limit(&c3)).abs() < 1e-15);
        for curve in [Curve::TwoBubble, Curve::SignChanging, Curve::SignChangingDirect] {
            let v = curve_limit_at_one(&c4, curve).unwrap();
            assert!((v - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-15);
            assert!((v - 0.5 * two_bubble_limit(&c4)).abs() < 1e-15);
        }
        // The approach is only algebraic in 1 − y; far out it is resolved.
        let far = curve_near_one(&c4, Curve::SignChanging, 1e-100).unwrap();
        assert!((far.value - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-6);
        let far = curve_near_one(&c3, Curve::TwoBubble, 1e-100).unwrap();
        assert!((far.value - e).abs() < 1e-6);
    }

    #[test]
    fn near_one_matches_regular_route() {
        let c3 = ctx(1, 1.0 / 6.0);
        let c4 = ctx(1, 0.25);
        for w in [1e-2, 1e-4] {
            for (c, curve) in [(c3, Curve::TwoBubble), (c4, Curve::TwoBubble), (c4, Curve::SignChanging)] {
                let a = curve_near_one(&c, curve, w).unwrap().value;
                let b = curve_point(&c, curve, 1.0 - w).unwrap().value;
                assert!((a - b).abs() < 1e-8, "w={w}: {a} vs {b}");
            }
        }
    }
}
