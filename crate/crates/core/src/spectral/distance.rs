use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

use serde::Serialize;

use super::function::{compensated_sum, energy_nonconstant, grid, Grid, SphereFunction};
use crate::conformal::SobolevContext;
use crate::error::{usage, Result};
use crate::specfun::MAX_ORDER;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Nearest element of a set of optimizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    /// Squared `H^s` distance `(u − h, P_s(u − h))`.
    pub dist_sq: f64,
    /// `c` in `h = c·v_z`.
    pub opt_amplitude: f64,
    /// Axis coordinate `z` of the center.
    pub opt_center: f64,
    /// Rotation of the axis on the circle, for non-axisymmetric inputs.
    pub opt_angle: Option<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

/// Distance to the constants: the optimal constant is the mean.
pub fn dist_to_constants(ctx: &SobolevContext, u: &SphereFunction) -> DistanceResult {
    DistanceResult {
        dist_sq: energy_nonconstant(ctx, u),
        opt_amplitude: u.mean(ctx.sphere_measure()),
        opt_center: 0.0,
        opt_angle: None,
        converged: true,
        evaluations: 0,
    }
}

/// Controls of the center search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub max_evaluations: usize,
    pub bracket_tolerance: f64,
    /// Centers are restricted to `|z| ≤ 1 − edge`.
    pub edge: f64,
    /// Points of the initial scan in `atanh z`.
    pub scan_points: usize,
    /// Angles of the initial scan for the rotated search on the circle.
    pub scan_angles: usize,
    /// Search over rotated axes too; `None` decides from the input's symmetry.
    pub full: Option<bool>,
    pub max_quad_order: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 200,
            bracket_tolerance: 1e-10,
            edge: 1e-6,
            scan_points: 65,
            scan_angles: 16,
            full: None,
            max_quad_order: MAX_ORDER,
        }
    }
}

/// `dist²(u, M)` over `M = {c·v_z}`; see [`dist_to_manifold_with`].
pub fn dist_to_manifold(ctx: &SobolevContext, u: &SphereFunction) -> Result<DistanceResult> {
    dist_to_manifold_with(ctx, u, &SearchOptions::default())
}

/// Minimize `(u − c·h_z, P_s(u − c·h_z))` over amplitude and center.
///
/// For a fixed center the amplitude is the Rayleigh projection and
/// `dist² = E_r − α(0)·D(2M + D)/|S^d|`, where `E_r` is the non-constant
/// energy, `M = ∫u` and `D = ∫u(h_z^{p−1} − 1)`. The center is searched in
/// `w = atanh z` by a uniform scan, golden-section refinement of the best
/// bracket and one parabolic step. On the circle a non-axisymmetric input
/// additionally gets an outer scan and golden search over the axis angle.
pub fn dist_to_manifold_with(
    ctx: &SobolevContext,
    u: &SphereFunction,
    opts: &SearchOptions,
) -> Result<DistanceResult> {
    let full = opts.full.unwrap_or(u.d() == 1 && !u.is_axisymmetric());
    if full && u.d() != 1 {
        return usage("rotated-center search is only available on the circle");
    }
    let objective = Objective::new(ctx, u, opts.max_quad_order);
    let w_max = (1.0 - opts.edge).atanh();
    let mut best = DistanceResult {
        dist_sq: objective.e_r,
        opt_amplitude: objective.mass / ctx.sphere_measure(),
        opt_center: 0.0,
        opt_angle: full.then_some(0.0),
        converged: true,
        evaluations: 0,
    };
    let mut evaluations = 0;
    let mut converged = true;

    let search_axis = |phi: f64, evaluations: &mut usize| {
        let mut local = 0;
        let line = line_search(
            |w| objective.dist_sq(w.tanh(), phi),
            -w_max,
            w_max,
            opts,
            &mut local,
        );
        *evaluations += local;
        line
    };

    if !full {
        let line = search_axis(0.0, &mut evaluations);
        converged &= line.converged;
        best.converged = line.converged;
        if line.value < best.dist_sq {
            best = objective.result(line.arg.tanh(), None, line.value);
        }
    } else {
        let k = opts.scan_angles.max(3);
        let step = PI / k as f64;
        let mut scan = Vec::with_capacity(k);
        for i in 0..k {
            let line = search_axis(i as f64 * step, &mut evaluations);
            converged &= line.converged;
            scan.push(line);
        }
        let i = (0..k).min_by(|&a, &b| scan[a].value.total_cmp(&scan[b].value)).unwrap();
        // The objective has period π in the angle (z ↦ −z covers the rest).
        let (mut a, mut b) = ((i as f64 - 1.0) * step, (i as f64 + 1.0) * step);
        let mut inner = |phi: f64, evaluations: &mut usize| {
            let line = search_axis(phi, evaluations);
            converged &= line.converged;
            line
        };
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let mut l1 = inner(x1, &mut evaluations);
        let mut l2 = inner(x2, &mut evaluations);
        let mut outer_steps = 0;
        while b - a > opts.bracket_tolerance && outer_steps < opts.max_evaluations {
            outer_steps += 1;
            if l1.value <= l2.value {
                b = x2;
                x2 = x1;
                l2 = l1;
                x1 = b - GOLDEN * (b - a);
                l1 = inner(x1, &mut evaluations);
            } else {
                a = x1;
                x1 = x2;
                l1 = l2;
                x2 = a + GOLDEN * (b - a);
                l2 = inner(x2, &mut evaluations);
            }
        }
        converged &= b - a <= opts.bracket_tolerance;
        let mut candidates = [(i as f64 * step, scan[i]), (x1, l1), (x2, l2)];
        candidates.sort_by(|p, q| p.1.value.total_cmp(&q.1.value));
        let (phi, line) = candidates[0];
        if line.value < best.dist_sq {
            best = objective.result(line.arg.tanh(), Some(phi.rem_euclid(PI)), line.value);
        }
    }
    best.converged = converged;
    best.evaluations = evaluations;
    Ok(best)
}

#[derive(Debug, Clone, Copy)]
struct LineResult {
    arg: f64,
    value: f64,
    converged: bool,
}

/// Scan, golden-section on the best bracket, then one parabolic step.
fn line_search(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    opts: &SearchOptions,
    evaluations: &mut usize,
) -> LineResult {
    let count = Cell::new(*evaluations);
    let eval = |x: f64| {
        count.set(count.get() + 1);
        f(x)
    };
    let k = opts.scan_points.max(3);
    let h = (hi - lo) / (k - 1) as f64;
    let xs: Vec<f64> = (0..k).map(|i| lo + i as f64 * h).collect();
    let fs: Vec<f64> = xs.iter().map(|&x| eval(x)).collect();
    let i = (0..k).min_by(|&a, &b| fs[a].total_cmp(&fs[b])).unwrap();
    let mut best = (xs[i], fs[i]);
    let (mut a, mut b) = (xs[i.saturating_sub(1)], xs[(i + 1).min(k - 1)]);

    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while b - a > opts.bracket_tolerance && count.get() < opts.max_evaluations {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = eval(x2);
        }
    }
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    let converged = b - a <= opts.bracket_tolerance;
    // Parabola through the two interior points and the nearer bracket end.
    let (p, q) = (x1, x2);
    let denom = (p - best.0) * (f2 - best.1) - (q - best.0) * (f1 - best.1);
    if converged && denom.abs() > 0.0 && count.get() < opts.max_evaluations {
        let num = (p - best.0).powi(2) * (f2 - best.1) - (q - best.0).powi(2) * (f1 - best.1);
        let x = best.0 - 0.5 * num / denom;
        if x > a && x < b && x.is_finite() {
            let fx = eval(x);
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    *evaluations = count.get();
    LineResult { arg: best.0, value: best.1, converged }
}

/// `dist²(z, φ)` with cached samples of `u` per quadrature order.
struct Objective<'a> {
    ctx: &'a SobolevContext,
    u: &'a SphereFunction,
    e_r: f64,
    mass: f64,
    base_order: usize,
    max_order: usize,
    samples: RefCell<HashMap<usize, Rc<(Grid, Vec<f64>)>>>,
}

impl<'a> Objective<'a> {
    fn new(ctx: &'a SobolevContext, u: &'a SphereFunction, max_order: usize) -> Self {
        Self {
            ctx,
            u,
            e_r: energy_nonconstant(ctx, u),
            mass: u.mean(ctx.sphere_measure()) * ctx.sphere_measure(),
            base_order: u.quad_order(),
            max_order: max_order.max(u.quad_order()),
            samples: RefCell::new(HashMap::new()),
        }
    }

    /// Quadrature order for a bubble centered at `z`: the integrand has a
    /// pole at distance `acosh(1/|z|)` from the real angle axis.
    fn order_for(&self, z: f64) -> usize {
        let mut n = self.base_order;
        if z == 0.0 {
            return n;
        }
        let needed = 40.0 / (1.0 / z.abs()).acosh();
        while (n as f64) < needed && 2 * n <= self.max_order {
            n *= 2;
        }
        n
    }

    fn samples(&self, n: usize) -> Rc<(Grid, Vec<f64>)> {
        if let Some(s) = self.samples.borrow().get(&n) {
            return s.clone();
        }
        let g = grid(self.u.d(), n).expect("orders are validated powers of two of a valid order");
        let values = self.u.values_on(&g);
        let entry = Rc::new((g, values));
        self.samples.borrow_mut().insert(n, entry.clone());
        entry
    }

    /// `D = ∫u(v_z^{p−1} − 1)` for the bubble centered at `z` on the axis rotated by `φ`.
    fn excess(&self, z: f64, phi: f64) -> f64 {
        if z == 0.0 {
            return 0.0;
        }
        let samples = self.samples(self.order_for(z));
        let (g, values) = (&samples.0, &samples.1);
        let p = self.ctx.p();
        let e = self.ctx.d() as f64 / p;
        let log_norm = 0.5 * e * (-z * z).ln_1p();
        compensated_sum(g.thetas.iter().zip(&g.weights).zip(values).map(|((th, w), u)| {
            let t = (th - phi).cos();
            w * u * ((p - 1.0) * (log_norm - e * (-z * t).ln_1p())).exp_m1()
        }))
    }

    fn dist_sq(&self, z: f64, phi: f64) -> f64 {
        let d = self.excess(z, phi);
        self.e_r - self.ctx.alpha0() * d * (2.0 * self.mass + d) / self.ctx.sphere_measure()
    }

    fn result(&self, z: f64, angle: Option<f64>, value: f64) -> DistanceResult {
        let d = self.excess(z, angle.unwrap_or(0.0));
        DistanceResult {
            dist_sq: value,
            opt_amplitude: (self.mass + d) / self.ctx.sphere_measure(),
            opt_center: z,
            opt_angle: angle,
            converged: true,
            evaluations: 0,
        }
    }
}
