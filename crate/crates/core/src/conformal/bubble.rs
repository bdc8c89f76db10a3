use super::context::SobolevContext;
use crate::error::{domain, Result};

/// The axisymmetric bubble `v_β(t) = (1 − β²)^{d/2p} (1 − βt)^{−d/p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble {
    beta: f64,
}

impl Bubble {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.abs() < 1.0) {
            return domain(format!("bubble parameter must satisfy |β| < 1, got {beta}"));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Value at a point whose last coordinate is `t`.
    pub fn value(&self, ctx: &SobolevContext, t: f64) -> f64 {
        let e = ctx.d() as f64 / ctx.p();
        let b = self.beta;
        (0.5 * e * (-b * b).ln_1p() - e * (-b * t).ln_1p()).exp()
    }
}

/// `v_β(t)`.
pub fn bubble_value(ctx: &SobolevContext, beta: f64, t: f64) -> Result<f64> {
    Ok(Bubble::new(beta)?.value(ctx, t))
}

/// `γ(β, β′) = (β − β′)/(1 − ββ′)`.
pub fn gamma_compose(beta: f64, beta_prime: f64) -> f64 {
    (beta - beta_prime) / (1.0 - beta * beta_prime)
}

/// Inverse of `β ↦ 2β/(1 + β²)` on `(−1, 1)`, with `0 ↦ 0`.
pub fn beta_from_gamma(gamma: f64) -> f64 {
    // Equal to (1 − √(1−γ²))/γ without the cancellation.
    gamma / (1.0 + (1.0 - gamma * gamma).sqrt())
}

/// `λ = √((1+β)/(1−β))`.
pub fn lambda_of_beta(beta: f64) -> f64 {
    ((1.0 + beta) / (1.0 - beta)).sqrt()
}

/// `β = (λ² − 1)/(λ² + 1)`.
pub fn beta_of_lambda(lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    (l2 - 1.0) / (l2 + 1.0)
}

/// Stereographic push-forward `u(S(x)) J(x)^{1/p}` of an axisymmetric `u`.
pub fn to_plane(ctx: &SobolevContext, u: impl Fn(f64) -> f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let t = (1.0 - r2) / (1.0 + r2);
    let jac_root = (2.0 / (1.0 + r2)).powf(ctx.d() as f64 / ctx.p());
    u(t) * jac_root
}

/// `B_λ(x) = λ^{d/p} (2/(1 + λ²|x|²))^{d/p}`.
pub fn plane_bubble(ctx: &SobolevContext, lambda: f64, x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let e = ctx.d() as f64 / ctx.p();
    (lambda * 2.0 / (1.0 + lambda * lambda * r2)).powf(e)
}
