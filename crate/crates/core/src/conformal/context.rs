use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::specfun::{ln_gamma_abs, log_gamma, QuadratureRule};

/// Fixed data of the inequality for a dimension `d` and order `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SobolevContext {
    d: usize,
    s: f64,
    p: f64,
    sphere_measure: f64,
    alpha0: f64,
    sobolev_const: f64,
    c_loc: f64,
    c_dim: f64,
}

/// Shorthand for [`SobolevContext::new`].
pub fn make_context(d: usize, s: f64) -> Result<SobolevContext> {
    SobolevContext::new(d, s)
}

/// `|S^n| = 2π^{(n+1)/2}/Γ((n+1)/2)`; `|S^0| = 2`.
fn sphere_measure(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * (h * PI.ln() - ln_gamma_abs(h)).exp()
}

/// `|S^{d−1}|`, the measure of the equatorial sphere.
pub fn lower_sphere_measure(d: usize) -> f64 {
    sphere_measure(d - 1)
}

impl SobolevContext {
    pub fn new(d: usize, s: f64) -> Result<Self> {
        if d == 0 {
            return domain("dimension must be at least 1");
        }
        let df = d as f64;
        if !(s > 0.0 && s < df / 2.0) {
            return domain(format!("order s = {s} outside (0, {})", df / 2.0));
        }
        let p = 2.0 * df / (df - 2.0 * s);
        let measure = sphere_measure(d);
        let alpha0 = (log_gamma(df / 2.0 + s)? - log_gamma(df / 2.0 - s)?).exp();
        let c_dim = ((df - 1.0) * std::f64::consts::LN_2 + ln_gamma_abs(df / 2.0)
            + ln_gamma_abs((df + 1.0) / 2.0)
            - ln_gamma_abs(0.5)
            - ln_gamma_abs(df))
        .exp();
        Ok(Self {
            d,
            s,
            p,
            sphere_measure: measure,
            alpha0,
            sobolev_const: alpha0 * measure.powf(1.0 - 2.0 / p),
            c_loc: 4.0 * s / (df + 2.0 * s + 2.0),
            c_dim,
        })
    }

    /// The context with critical exponent `p`, i.e. `s = d(p − 2)/(2p)`.
    pub fn for_exponent(d: usize, p: f64) -> Result<Self> {
        if !(p > 2.0) || !p.is_finite() {
            return domain(format!("exponent p = {p} must exceed 2"));
        }
        let mut ctx = Self::new(d, d as f64 * (p - 2.0) / (2.0 * p))?;
        ctx.p = p;
        Ok(ctx)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn sphere_measure(&self) -> f64 {
        self.sphere_measure
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn sobolev_const(&self) -> f64 {
        self.sobolev_const
    }

    pub fn c_loc(&self) -> f64 {
        self.c_loc
    }

    pub fn c_dim(&self) -> f64 {
        self.c_dim
    }

    /// Whether the critical exponent equals `p` up to round-off.
    pub fn has_exponent(&self, p: f64) -> bool {
        (self.p - p).abs() < 1e-9
    }

    /// Eigenvalue `α(ℓ)` of `P_s` on degree-`ℓ` harmonics.
    pub fn alpha(&self, ell: usize) -> f64 {
        let h = self.d as f64 / 2.0;
        (0..ell).fold(self.alpha0, |a, k| {
            let k = k as f64;
            a * (k + h + self.s) / (k + h - self.s)
        })
    }

    /// `α(0), …, α(L)`.
    pub fn alpha_table(&self, lmax: usize) -> Vec<f64> {
        let h = self.d as f64 / 2.0;
        let mut out = Vec::with_capacity(lmax + 1);
        let mut a = self.alpha0;
        for k in 0..=lmax {
            out.push(a);
            let kf = k as f64;
            a *= (kf + h + self.s) / (kf + h - self.s);
        }
        out
    }
}

/// `∫_{S^d} f(ω_{d+1}) dω` for an axisymmetric integrand, using `rule` in
/// the polar angle `θ ∈ [0, π]` with `t = cos θ`.
pub fn axial_integral(d: usize, rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> f64 {
    let k = d as i32 - 1;
    lower_sphere_measure(d) * rule.integrate_on(0.0, PI, |th| f(th.cos()) * th.sin().powi(k))
}
