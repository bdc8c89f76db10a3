use super::context::SobolevContext;
use crate::error::{domain, Result};
use crate::specfun::{hyp2f1, hyp2f1_near_one, Hyp2F1Args};

/// `I_q(β) = |S^d|^{−1} ∫ v_β^q`, through
/// `c_d ((1−β)/(1+β))^{dq/2p} ₂F₁(dq/p, d/2; d; 2β/(1+β))`.
///
/// The integral is even in `β`; negative parameters use `|β|`.
pub fn bubble_mass(ctx: &SobolevContext, q: f64, beta: f64) -> Result<f64> {
    check_q(q)?;
    let b = beta.abs();
    if !(b < 1.0) {
        return domain(format!("bubble_mass requires |β| < 1, got {beta}"));
    }
    if b == 0.0 {
        return Ok(ctx.c_dim());
    }
    let d = ctx.d() as f64;
    let a = d * q / ctx.p();
    let z = 2.0 * b / (1.0 + b);
    let prefactor = (0.5 * a * ((1.0 - b) / (1.0 + b)).ln()).exp();
    Ok(ctx.c_dim() * prefactor * hyp2f1(Hyp2F1Args::new(a, d / 2.0, d, z))?)
}

/// `1 − I_q(β)` without cancellation for small `β`.
///
/// For `β² ≤ 1/2` this uses `I_q(β) = (1−β²)^{a/2} ₂F₁(a/2, (a+1)/2; (d+1)/2; β²)`
/// with `a = dq/p`, whose series converges geometrically; larger `β` fall
/// back to `1 − bubble_mass`.
pub fn mass_defect(ctx: &SobolevContext, q: f64, beta: f64) -> Result<f64> {
    check_q(q)?;
    let b = beta.abs();
    if !(b < 1.0) {
        return domain(format!("mass_defect requires |β| < 1, got {beta}"));
    }
    let g2 = b * b;
    if g2 > 0.5 {
        return Ok(1.0 - bubble_mass(ctx, q, b)?);
    }
    let d = ctx.d() as f64;
    let half_a = 0.5 * d * q / ctx.p();
    let (ca, cb, cc) = (half_a, half_a + 0.5, 0.5 * (d + 1.0));
    let mut term = ca * cb / cc * g2;
    let mut tail = term;
    let mut n = 1.0;
    while term.abs() > 1e-18 * tail.abs() && n < 10_000.0 {
        term *= (ca + n) * (cb + n) / ((cc + n) * (n + 1.0)) * g2;
        tail += term;
        n += 1.0;
    }
    Ok(-(half_a * (-g2).ln_1p() + tail.ln_1p()).exp_m1())
}

/// `m_q(y) = c_d (1−y)^{dq/2p} ₂F₁(dq/p, d/2; d; y)`, equal to `I_q(y/(2−y))`.
///
/// At `y = 1` the analytic limit `0` is returned (valid for `q < p`).
pub fn m_q_of_y(ctx: &SobolevContext, q: f64, y: f64) -> Result<f64> {
    check_y(y)?;
    if y == 1.0 {
        return endpoint(ctx, q).map(|_| 0.0);
    }
    bubble_mass(ctx, q, y / (2.0 - y))
}

/// `1 − m_q(y)`.
pub fn mass_defect_of_y(ctx: &SobolevContext, q: f64, y: f64) -> Result<f64> {
    check_y(y)?;
    if y == 1.0 {
        return endpoint(ctx, q).map(|_| 1.0);
    }
    mass_defect(ctx, q, y / (2.0 - y))
}

/// `m(y) = m_1(y)`.
pub fn m_of_y(ctx: &SobolevContext, y: f64) -> Result<f64> {
    m_q_of_y(ctx, 1.0, y)
}

/// `m₂(y) = m_2(y)`.
pub fn m2_of_y(ctx: &SobolevContext, y: f64) -> Result<f64> {
    m_q_of_y(ctx, 2.0, y)
}

/// `m_q(1 − w)` for small `w` through the connection formulas at `z = 1`.
pub fn m_q_near_one(ctx: &SobolevContext, q: f64, w: f64) -> Result<f64> {
    check_q(q)?;
    let d = ctx.d() as f64;
    let a = d * q / ctx.p();
    Ok(ctx.c_dim() * (0.5 * a * w.ln()).exp() * hyp2f1_near_one(a, d / 2.0, d, w)?)
}

/// `lim_{β→1} ℰ(u_β) = 2 − 2^{(d−2s)/d}`.
pub fn two_bubble_limit(ctx: &SobolevContext) -> f64 {
    2.0 - 2f64.powf(2.0 / ctx.p())
}

/// `y = 4β/(1+β)²`.
pub fn y_of_beta(beta: f64) -> f64 {
    4.0 * beta / ((1.0 + beta) * (1.0 + beta))
}

/// Inverse of [`y_of_beta`] on `[0, 1]`: `ŷ = 1 − √(1−y)`, `β = ŷ/(2 − ŷ)`.
pub fn beta_of_y(y: f64) -> f64 {
    let yh = y / (1.0 + (1.0 - y).sqrt());
    yh / (2.0 - yh)
}

fn check_q(q: f64) -> Result<()> {
    if !(q > 0.0 && q.is_finite()) {
        return domain(format!("mass exponent q must be positive, got {q}"));
    }
    Ok(())
}

fn check_y(y: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&y) {
        return domain(format!("y must lie in [0, 1], got {y}"));
    }
    Ok(())
}

fn endpoint(ctx: &SobolevContext, q: f64) -> Result<()> {
    check_q(q)?;
    if q >= ctx.p() {
        return domain("the y = 1 limit of m_q is only defined for q < p");
    }
    Ok(())
}
