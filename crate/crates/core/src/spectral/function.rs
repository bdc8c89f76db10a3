use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{lower_sphere_measure, SobolevContext};
use crate::error::{usage, Error, Result};
use crate::specfun::{gauss_legendre_shared, gegenbauer_all, gegenbauer_norm_sq, MAX_ORDER};

/// Share of the squared norm allowed in the top tenth of the degrees.
const TRUNCATION_WARNING_RATIO: f64 = 1e-6;
/// Relative change of `∫|u|^q` tolerated under doubling of the grid.
const LP_DOUBLING_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    /// `{1, cos ℓθ, sin ℓθ}` on the circle; coefficients `[a₀, a₁, b₁, a₂, b₂, …]`.
    FourierS1,
    /// `L²`-orthonormal axisymmetric harmonics on `S^d`; coefficients `[c₀, c₁, …]`.
    GegenbauerAxi,
}

/// Truncation degree and quadrature order used by [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralConfig {
    pub truncation: usize,
    pub quad_order: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self { truncation: 512, quad_order: 4096 }
    }
}

impl SpectralConfig {
    pub fn new(truncation: usize, quad_order: usize) -> Self {
        Self { truncation, quad_order }
    }

    pub fn validate(&self) -> Result<()> {
        if self.truncation < 2 {
            return usage(format!("truncation must be at least 2, got {}", self.truncation));
        }
        if self.quad_order <= 2 * self.truncation {
            return usage(format!(
                "quadrature order {} must exceed twice the truncation {}",
                self.quad_order, self.truncation
            ));
        }
        if self.quad_order > MAX_ORDER {
            return usage(format!("quadrature order above {MAX_ORDER}"));
        }
        Ok(())
    }
}

/// Quadrature nodes in the polar angle with weights for `∫_{S^d} · dω`.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
    /// Equispaced nodes `2πj/n` on the full circle.
    equispaced: bool,
}

pub(crate) fn grid(d: usize, n: usize) -> Result<Grid> {
    if d == 1 {
        let h = 2.0 * PI / n as f64;
        return Ok(Grid {
            thetas: (0..n).map(|j| j as f64 * h).collect(),
            weights: vec![h; n],
            equispaced: true,
        });
    }
    let rule = gauss_legendre_shared(n)?;
    let lower = lower_sphere_measure(d);
    let k = d as i32 - 1;
    let (thetas, weights) = rule
        .mapped(0.0, PI)
        .map(|(th, w)| (th, w * lower * th.sin().powi(k)))
        .unzip();
    Ok(Grid { thetas, weights, equispaced: false })
}

/// A truncated harmonic expansion on `S^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereFunction {
    d: usize,
    basis: Basis,
    coefficients: Vec<f64>,
    truncation: usize,
    quad_order: usize,
    truncation_warning: bool,
}

/// `1/√(|S^{d−1}| h_ℓ)`, turning `C_ℓ^λ` into orthonormal harmonics.
fn axial_scales(d: usize, lmax: usize) -> Vec<f64> {
    let lambda = 0.5 * (d as f64 - 1.0);
    let lower = lower_sphere_measure(d);
    (0..=lmax)
        .map(|ell| 1.0 / (lower * gegenbauer_norm_sq(ell, lambda)).sqrt())
        .collect()
}

impl SphereFunction {
    /// Wrap coefficients in the basis native to `d`.
    pub fn from_coefficients(d: usize, coefficients: Vec<f64>, quad_order: usize) -> Result<Self> {
        let (basis, truncation) = if d == 1 {
            if coefficients.len() % 2 == 0 {
                return usage("circle coefficients come as a₀ followed by (aℓ, bℓ) pairs");
            }
            (Basis::FourierS1, coefficients.len() / 2)
        } else {
            if coefficients.is_empty() {
                return usage("at least one coefficient is required");
            }
            (Basis::GegenbauerAxi, coefficients.len() - 1)
        };
        let mut u = Self { d, basis, coefficients, truncation, quad_order, truncation_warning: false };
        u.truncation_warning = u.top_decile_share() > TRUNCATION_WARNING_RATIO;
        Ok(u)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    /// The top tenth of the degrees carries a noticeable share of the norm.
    pub fn truncation_warning(&self) -> bool {
        self.truncation_warning
    }

    fn top_decile_share(&self) -> f64 {
        let norms = self.degree_norms_sq();
        let total: f64 = norms.iter().sum();
        let start = (self.truncation * 9) / 10 + 1;
        let top: f64 = norms.iter().skip(start).sum();
        if total > 0.0 {
            top / total
        } else {
            0.0
        }
    }

    /// `‖π_ℓ u‖²_{L²}` for `ℓ = 0..=L`, with `π_ℓ` the projection on degree `ℓ`.
    pub fn degree_norms_sq(&self) -> Vec<f64> {
        match self.basis {
            Basis::FourierS1 => {
                let c = &self.coefficients;
                let mut out = Vec::with_capacity(self.truncation + 1);
                out.push(2.0 * PI * c[0] * c[0]);
                for ell in 1..=self.truncation {
                    let (a, b) = (c[2 * ell - 1], c[2 * ell]);
                    out.push(PI * (a * a + b * b));
                }
                out
            }
            Basis::GegenbauerAxi => self.coefficients.iter().map(|c| c * c).collect(),
        }
    }

    /// Average of `u` over the sphere.
    pub fn mean(&self, sphere_measure: f64) -> f64 {
        match self.basis {
            Basis::FourierS1 => self.coefficients[0],
            Basis::GegenbauerAxi => self.coefficients[0] / sphere_measure.sqrt(),
        }
    }

    /// No sine content (circle) or always (axisymmetric basis).
    pub fn is_axisymmetric(&self) -> bool {
        match self.basis {
            Basis::GegenbauerAxi => true,
            Basis::FourierS1 => {
                let scale = self.coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                (1..=self.truncation).all(|ell| self.coefficients[2 * ell].abs() <= 1e-15 * scale)
            }
        }
    }

    /// Degree of the coefficient at `index`.
    fn degree_of(&self, index: usize) -> usize {
        match self.basis {
            Basis::FourierS1 => index.div_ceil(2),
            Basis::GegenbauerAxi => index,
        }
    }

    /// Value at polar angle `θ` (`t = cos θ`).
    pub fn eval(&self, theta: f64) -> f64 {
        match self.basis {
            Basis::FourierS1 => {
                let c = &self.coefficients;
                (1..=self.truncation).fold(c[0], |acc, ell| {
                    let x = ell as f64 * theta;
                    acc + c[2 * ell - 1] * x.cos() + c[2 * ell] * x.sin()
                })
            }
            Basis::GegenbauerAxi => {
                let scales = axial_scales(self.d, self.truncation);
                let mut buf = vec![0.0; self.truncation + 1];
                self.eval_axial(theta.cos(), &scales, &mut buf)
            }
        }
    }

    fn eval_axial(&self, t: f64, scales: &[f64], buf: &mut [f64]) -> f64 {
        gegenbauer_all(0.5 * (self.d as f64 - 1.0), t, buf);
        buf.iter().zip(scales).zip(&self.coefficients).map(|((y, s), c)| y * s * c).sum()
    }

    /// Values at polar angles `thetas`.
    pub fn synthesize(&self, thetas: &[f64]) -> Vec<f64> {
        match self.basis {
            Basis::FourierS1 => thetas.par_iter().map(|&th| self.eval(th)).collect(),
            Basis::GegenbauerAxi => self.axial_values(thetas),
        }
    }

    fn axial_values(&self, thetas: &[f64]) -> Vec<f64> {
        let scales = axial_scales(self.d, self.truncation);
        thetas
            .par_iter()
            .map_init(
                || vec![0.0; self.truncation + 1],
                |buf, &th| self.eval_axial(th.cos(), &scales, buf),
            )
            .collect()
    }

    /// Values on a quadrature grid.
    pub(crate) fn values_on(&self, g: &Grid) -> Vec<f64> {
        match self.basis {
            Basis::FourierS1 if g.equispaced => {
                let n = g.thetas.len();
                let (cos, sin) = trig_table(n);
                let c = &self.coefficients;
                (0..n)
                    .into_par_iter()
                    .map(|j| {
                        (1..=self.truncation).fold(c[0], |acc, ell| {
                            let m = (ell * j) % n;
                            acc + c[2 * ell - 1] * cos[m] + c[2 * ell] * sin[m]
                        })
                    })
                    .collect()
            }
            _ => self.synthesize(&g.thetas),
        }
    }

    /// Multiply each coefficient by a function of its degree.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let coefficients =
            self.coefficients.iter().enumerate().map(|(i, c)| c * f(self.degree_of(i))).collect();
        Self { coefficients, ..self.clone() }
    }
}

/// Neumaier's compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        self.carry += if self.sum.abs() >= v.abs() { (self.sum - t) + v } else { (v - t) + self.sum };
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

fn trig_table(n: usize) -> (Vec<f64>, Vec<f64>) {
    (0..n).map(|m| (2.0 * PI * m as f64 / n as f64).sin_cos()).map(|(s, c)| (c, s)).unzip()
}

/// Expand `f(θ)` with the configuration's truncation and quadrature order.
pub fn analyze(
    ctx: &SobolevContext,
    cfg: &SpectralConfig,
    f: impl Fn(f64) -> f64 + Sync,
) -> Result<SphereFunction> {
    cfg.validate()?;
    analyze_with_order(ctx.d(), cfg.truncation, cfg.quad_order, f)
}

/// [`analyze`] with explicit parameters and no context.
pub fn analyze_with_order(
    d: usize,
    lmax: usize,
    order: usize,
    f: impl Fn(f64) -> f64 + Sync,
) -> Result<SphereFunction> {
    SpectralConfig::new(lmax, order).validate()?;
    let g = grid(d, order)?;
    let samples: Vec<f64> = g.thetas.par_iter().map(|&th| f(th)).collect();
    if let Some(bad) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite sample at θ = {}", g.thetas[bad])));
    }
    let coefficients = if d == 1 {
        let n = order;
        let (cos, sin) = trig_table(n);
        let scale = 2.0 / n as f64;
        let mut c = vec![compensated_sum(samples.iter().copied()) / n as f64];
        let pairs: Vec<(f64, f64)> = (1..=lmax)
            .into_par_iter()
            .map(|ell| {
                let a = compensated_sum(samples.iter().enumerate().map(|(j, u)| u * cos[(ell * j) % n]));
                let b = compensated_sum(samples.iter().enumerate().map(|(j, u)| u * sin[(ell * j) % n]));
                (a * scale, b * scale)
            })
            .collect();
        for (a, b) in pairs {
            c.push(a);
            c.push(b);
        }
        c
    } else {
        let scales = axial_scales(d, lmax);
        let lambda = 0.5 * (d as f64 - 1.0);
        let mut acc = vec![Accumulator::default(); lmax + 1];
        let mut buf = vec![0.0; lmax + 1];
        for ((th, w), u) in g.thetas.iter().zip(&g.weights).zip(&samples) {
            gegenbauer_all(lambda, th.cos(), &mut buf);
            for ((a, y), s) in acc.iter_mut().zip(&buf).zip(&scales) {
                a.add(w * u * y * s);
            }
        }
        acc.iter().map(Accumulator::value).collect()
    };
    SphereFunction::from_coefficients(d, coefficients, order)
}

/// `P_s u`, computed spectrally.
pub fn apply_operator(ctx: &SobolevContext, u: &SphereFunction) -> SphereFunction {
    let alpha = ctx.alpha_table(u.truncation());
    u.scale_by_degree(|ell| alpha[ell])
}

/// `(u, P_s u) = Σ_ℓ α(ℓ)‖π_ℓ u‖²`.
pub fn energy(ctx: &SobolevContext, u: &SphereFunction) -> f64 {
    let alpha = ctx.alpha_table(u.truncation());
    u.degree_norms_sq().iter().zip(&alpha).map(|(n, a)| n * a).sum()
}

/// Energy of `u` minus its mean: `Σ_{ℓ≥1} α(ℓ)‖π_ℓ u‖²`.
pub fn energy_nonconstant(ctx: &SobolevContext, u: &SphereFunction) -> f64 {
    let alpha = ctx.alpha_table(u.truncation());
    u.degree_norms_sq().iter().zip(&alpha).skip(1).map(|(n, a)| n * a).sum()
}

/// `(u, P_s v)` for two expansions in the same basis.
pub fn energy_inner(ctx: &SobolevContext, u: &SphereFunction, v: &SphereFunction) -> Result<f64> {
    if u.d() != v.d() || u.coefficients().len() != v.coefficients().len() {
        return usage("inner product needs expansions of equal dimension and truncation");
    }
    let alpha = ctx.alpha_table(u.truncation());
    let weight = |i: usize| match u.basis() {
        Basis::FourierS1 if i == 0 => 2.0 * PI,
        Basis::FourierS1 => PI,
        Basis::GegenbauerAxi => 1.0,
    };
    Ok(u.coefficients()
        .iter()
        .zip(v.coefficients())
        .enumerate()
        .map(|(i, (a, b))| alpha[u.degree_of(i)] * weight(i) * a * b)
        .sum())
}

/// `∫|u|^q` on the grid of order `n`.
pub(crate) fn abs_power_integral(u: &SphereFunction, q: f64, n: usize) -> Result<f64> {
    let g = grid(u.d(), n)?;
    let values = u.values_on(&g);
    Ok(compensated_sum(values.iter().zip(&g.weights).map(|(v, w)| w * v.abs().powf(q))))
}

/// `(∫|u|^q dω)^{1/q}` from the synthesized values; the quadrature is
/// repeated at twice (or, at the cap, half) the order as a convergence check.
pub fn lp_norm(_ctx: &SobolevContext, u: &SphereFunction, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return usage(format!("L^q norm needs q ≥ 1, got {q}"));
    }
    let n = u.quad_order();
    let primary = abs_power_integral(u, q, n)?;
    let other = if 2 * n <= MAX_ORDER { 2 * n } else { n / 2 };
    let check = abs_power_integral(u, q, other)?;
    if (primary - check).abs() > LP_DOUBLING_TOLERANCE * primary.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Accuracy(format!(
            "L^{q} quadrature changed from {primary:e} to {check:e} between orders {n} and {other}"
        )));
    }
    Ok(primary.powf(1.0 / q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::Bubble;

    fn circle(s: f64) -> SobolevContext {
        SobolevContext::new(1, s).unwrap()
    }

    #[test]
    fn constant_and_single_mode() {
        let ctx = circle(1.0 / 6.0);
        let cfg = SpectralConfig::new(16, 64);
        let u = analyze(&ctx, &cfg, |_| 1.0).unwrap();
        assert!((u.coefficients()[0] - 1.0).abs() < 1e-15);
        assert!(u.coefficients()[1..].iter().all(|c| c.abs() < 1e-14));
        let v = analyze(&ctx, &cfg, |th| (2.0 * th).sin()).unwrap();
        for (i, c) in v.coefficients().iter().enumerate() {
            let expect = if i == 4 { 1.0 } else { 0.0 };
            assert!((c - expect).abs() < 1e-14, "i={i}");
        }
        assert!(!v.is_axisymmetric());
        assert!((energy(&ctx, &v) - ctx.alpha(2) * PI).abs() < 1e-13);
        assert!((energy(&ctx, &u) - ctx.alpha0() * 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn axial_constant_and_parseval() {
        for d in [2usize, 3, 5] {
            let ctx = SobolevContext::new(d, 0.5).unwrap();
            let cfg = SpectralConfig::new(24, 128);
            let u = analyze(&ctx, &cfg, |_| 1.0).unwrap();
            assert!((u.mean(ctx.sphere_measure()) - 1.0).abs() < 1e-13);
            assert!(u.coefficients()[1..].iter().all(|c| c.abs() < 1e-13), "d={d}");
            assert!((energy(&ctx, &u) - ctx.alpha0() * ctx.sphere_measure()).abs() < 1e-12);

            let f = |th: f64| (0.3 * th.cos()).exp();
            let v = analyze(&ctx, &cfg, f).unwrap();
            let l2: f64 = v.degree_norms_sq().iter().sum();
            let direct = abs_power_integral(&v, 2.0, 256).unwrap();
            assert!((l2 - direct).abs() < 1e-10 * direct);
            for th in [0.1, 1.0, 2.5] {
                assert!((v.eval(th) - f(th)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn round_trip_coefficients() {
        let ctx = SobolevContext::new(3, 0.4).unwrap();
        let coefficients: Vec<f64> = (0..=20).map(|k| 1.0 / (1.0 + k as f64).powi(2)).collect();
        let u = SphereFunction::from_coefficients(3, coefficients.clone(), 64).unwrap();
        let cfg = SpectralConfig::new(20, 64);
        let v = analyze(&ctx, &cfg, |th| u.eval(th)).unwrap();
        for (a, b) in v.coefficients().iter().zip(&coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
        let ctx1 = circle(0.25);
        let coefficients: Vec<f64> = (0..41).map(|k| ((k * 7 % 11) as f64 - 5.0) / 10.0).collect();
        let u = SphereFunction::from_coefficients(1, coefficients.clone(), 128).unwrap();
        let v = analyze(&ctx1, &SpectralConfig::new(20, 128), |th| u.eval(th)).unwrap();
        for (a, b) in v.coefficients().iter().zip(&coefficients) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn bubble_round_trip_and_energy() {
        let ctx = circle(1.0 / 6.0);
        let v = Bubble::new(0.6).unwrap();
        let u = analyze(&ctx, &SpectralConfig::default(), |th| v.value(&ctx, th.cos())).unwrap();
        assert!(!u.truncation_warning());
        for k in 0..100 {
            let th = 0.0627 * k as f64;
            assert!((u.eval(th) - v.value(&ctx, th.cos())).abs() < 1e-10);
        }
        let v = Bubble::new(0.5).unwrap();
        let u = analyze(&ctx, &SpectralConfig::default(), |th| v.value(&ctx, th.cos())).unwrap();
        assert!((energy(&ctx, &u) - ctx.alpha0() * 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn lp_norms() {
        let ctx = circle(1.0 / 6.0);
        let cfg = SpectralConfig::default();
        let one = analyze(&ctx, &cfg, |_| 1.0).unwrap();
        let expect = ctx.sphere_measure().powf(1.0 / ctx.p());
        assert!((lp_norm(&ctx, &one, ctx.p()).unwrap() - expect).abs() < 1e-13);
        let v = Bubble::new(0.7).unwrap();
        let u = analyze(&ctx, &cfg, |th| v.value(&ctx, th.cos())).unwrap();
        assert!((lp_norm(&ctx, &u, ctx.p()).unwrap() - expect).abs() < 1e-10);
        assert!(lp_norm(&ctx, &u, 0.5).is_err());
    }

    #[test]
    fn truncation_warning_for_rough_input() {
        let ctx = circle(0.25);
        let u = analyze(&ctx, &SpectralConfig::new(16, 64), |th| (th - PI).abs()).unwrap();
        assert!(u.truncation_warning());
    }

    #[test]
    fn compensated_summation() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(v), 2.0);
        let n = 1 << 20;
        let s = compensated_sum((0..n).map(|_| 0.1));
        assert!((s - 0.1 * n as f64).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        assert!(SpectralConfig::new(1, 64).validate().is_err());
        assert!(SpectralConfig::new(32, 64).validate().is_err());
        assert!(SpectralConfig::new(32, 65).validate().is_ok());
        assert!(SpectralConfig::new(32, MAX_ORDER * 2).validate().is_err());
    }

    #[test]
    fn operator_on_bubbles() {
        // P_s v_β = α(0) v_β^{p−1}.
        for (d, s, b) in [(1usize, 0.25, 0.4), (3, 0.5, -0.3)] {
            let ctx = SobolevContext::new(d, s).unwrap();
            let v = Bubble::new(b).unwrap();
            let u = analyze(&ctx, &SpectralConfig::new(128, 512), |th| v.value(&ctx, th.cos())).unwrap();
            let pu = apply_operator(&ctx, &u);
            for th in [0.0f64, 0.7, 2.0, 3.1] {
                let expect = ctx.alpha0() * v.value(&ctx, th.cos()).powf(ctx.p() - 1.0);
                assert!((pu.eval(th) - expect).abs() < 1e-9, "d={d} θ={th}");
            }
        }
    }
}
