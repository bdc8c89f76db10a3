use serde::Serialize;

use super::distance::{dist_to_constants, dist_to_manifold_with, DistanceResult, SearchOptions};
use super::function::{compensated_sum, energy, energy_nonconstant, grid, SphereFunction};
use crate::conformal::SobolevContext;
use crate::error::{Error, Result};

/// Inputs with `dist² ≤ DEGENERATE_RATIO · energy` count as lying on the optimizer set.
pub const DEGENERATE_RATIO: f64 = 1e-12;

/// Both quotients of one input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientReport {
    pub d: usize,
    pub s: f64,
    pub p: f64,
    pub input: String,
    pub energy: f64,
    pub deficit: f64,
    pub dist_sq_c: f64,
    /// Absent when only the modified quotient was requested.
    pub dist_sq_m: Option<f64>,
    #[serde(rename = "E")]
    pub e: Option<f64>,
    #[serde(rename = "E_tilde")]
    pub e_tilde: f64,
    pub distance: Option<DistanceResult>,
    pub truncation_warning: bool,
}

/// Sobolev deficit `(u, P_s u) − S_{d,s}‖u‖_p²`.
///
/// For inputs with positive mean `ū` and `u > 0` the deficit is rewritten as
/// `E_r − α(0)|S^d|ū²·((1 + M)^{2/p} − 1)` with
/// `M = ⨍((1 + x)^p − 1 − px)`, `x = u/ū − 1`, which keeps full relative
/// accuracy when `u` is close to a constant.
pub fn deficit(ctx: &SobolevContext, u: &SphereFunction) -> Result<f64> {
    let g = grid(u.d(), u.quad_order())?;
    let values = u.values_on(&g);
    let measure = compensated_sum(g.weights.iter().copied());
    let mean = compensated_sum(values.iter().zip(&g.weights).map(|(v, w)| v * w)) / measure;
    let p = ctx.p();
    let stable = mean > 0.0 && values.iter().all(|v| *v > 0.0);
    if !stable {
        let lp = compensated_sum(values.iter().zip(&g.weights).map(|(v, w)| w * v.abs().powf(p)));
        return Ok(energy(ctx, u) - ctx.sobolev_const() * lp.powf(2.0 / p));
    }
    let m = compensated_sum(values.iter().zip(&g.weights).map(|(v, w)| {
        let x = v / mean - 1.0;
        w * ((p * x.ln_1p()).exp_m1() - p * x)
    })) / measure;
    let coef_mean = u.mean(ctx.sphere_measure());
    let base = ctx.alpha0() * ctx.sphere_measure();
    let growth = ((2.0 / p) * m.ln_1p()).exp_m1();
    Ok(energy_nonconstant(ctx, u)
        - base * (mean * mean * growth + (mean - coef_mean) * (mean + coef_mean)))
}

fn report(ctx: &SobolevContext, u: &SphereFunction, input: &str) -> Result<QuotientReport> {
    let e = energy(ctx, u);
    let dc = dist_to_constants(ctx, u).dist_sq;
    if dc <= DEGENERATE_RATIO * e {
        return Err(Error::Degenerate(format!("{input} is constant to working precision")));
    }
    let def = deficit(ctx, u)?;
    Ok(QuotientReport {
        d: ctx.d(),
        s: ctx.s(),
        p: ctx.p(),
        input: input.to_string(),
        energy: e,
        deficit: def,
        dist_sq_c: dc,
        dist_sq_m: None,
        e: None,
        e_tilde: def / dc,
        distance: None,
        truncation_warning: u.truncation_warning(),
    })
}

/// `ℰ̃(u) = deficit / dist²(u, constants)`.
pub fn modified_quotient(ctx: &SobolevContext, u: &SphereFunction, input: &str) -> Result<QuotientReport> {
    report(ctx, u, input)
}

/// `ℰ(u)` and `ℰ̃(u)`; fails with [`Error::Degenerate`] when `u` lies on the
/// optimizer set within [`DEGENERATE_RATIO`].
pub fn be_quotient(
    ctx: &SobolevContext,
    u: &SphereFunction,
    input: &str,
    opts: &SearchOptions,
) -> Result<QuotientReport> {
    let mut r = report(ctx, u, input)?;
    let dm = dist_to_manifold_with(ctx, u, opts)?;
    if dm.dist_sq <= DEGENERATE_RATIO * r.energy {
        return Err(Error::Degenerate(format!(
            "{input} lies on the optimizer manifold (dist² = {:e})",
            dm.dist_sq
        )));
    }
    r.dist_sq_m = Some(dm.dist_sq);
    r.e = Some(r.deficit / dm.dist_sq);
    r.distance = Some(dm);
    Ok(r)
}
