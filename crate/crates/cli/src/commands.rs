use rayon::prelude::*;
use stab_core::closedform::{
    curve_point, local_quadratic_coefficient, rho_value, small_beta_coefficients, Curve,
};
use stab_core::conformal::{axial_integral, beta_of_y, y_of_beta, SobolevContext};
use stab_core::spectral::{
    be_quotient, family_function, family_profile, modified_quotient, Family, SearchOptions, SpectralConfig,
};
use stab_core::specfun::gauss_legendre;

use crate::cli::{Direction, Options};
use crate::grid::Grid;
use crate::report::{
    emit, to_csv, to_json, Aggregate, Fit, Monotonicity, Point, Provenance, SRow, Status, Tolerances,
    VerificationReport,
};
use crate::svg::line_chart;

const MONOTONE_SLACK: f64 = 1e-12;
const MONOTONE_FROM: f64 = 0.01;
const CLOSED_FORM_AGREEMENT: f64 = 1e-6;
const FIT_RELATIVE: f64 = 0.01;
const SCALING_RELATIVE: f64 = 0.10;
const EXPECTED_EXPONENT: f64 = 2.0;
const PROJECTION_ORDER: usize = 256;

const CURVE_GRID: &str = "0.005:0.995:200";
const SCAN_S_GRID: &str = "0.05:0.45:9";
const SCAN_BETA_GRID: &str = "0.05:0.95:19";
const SLOPE_GRID: &str = "0.001,0.002,0.005,0.01,0.02,0.05,0.1";
const RHO_GRID: &str = "0.01,0.02,0.05";

/// `(E_tilde, deficit, dist² to constants, closed-form value)` at one `(s, β)`.
type ScanSample = (f64, f64, f64, Option<f64>);
/// `(E, deficit, dist² to the manifold, converged)` at one parameter.
type ExpansionSample = (f64, f64, f64, bool);

/// `Err` carries a configuration error (exit code 2).
pub type Outcome = Result<Status, String>;

#[derive(Debug, Clone, Copy)]
enum Method {
    Closed(Curve),
    Spectral,
}

impl Method {
    fn name(&self) -> &'static str {
        match self {
            Method::Closed(_) => "closed-form",
            Method::Spectral => "spectral",
        }
    }

    fn curve_name(&self) -> Option<&'static str> {
        match self {
            Method::Closed(Curve::TwoBubble) => Some("two-bubble"),
            Method::Closed(Curve::SignChanging) => Some("sign-changing"),
            Method::Closed(Curve::SignChangingDirect) => Some("sign-changing-direct"),
            Method::Spectral => None,
        }
    }
}

struct Eval {
    value: f64,
    numerator: f64,
    denominator: f64,
    loc_margin: f64,
}

fn context(o: &Options) -> Result<SobolevContext, String> {
    let ctx = match (&o.s, o.p) {
        (Some(s), None) => {
            let s: f64 = s.trim().parse().map_err(|_| format!("--s '{s}' is not a number"))?;
            SobolevContext::new(o.d, s)
        }
        (None, Some(p)) => SobolevContext::for_exponent(o.d, p as f64),
        (None, None) => return Err("one of --s or --p is required".into()),
        (Some(_), Some(_)) => return Err("--s and --p are mutually exclusive".into()),
    };
    ctx.map_err(|e| e.to_string())
}

fn spectral_config(o: &Options) -> Result<SpectralConfig, String> {
    let cfg = SpectralConfig::new(o.truncation, o.quad_order);
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn grid(o: &Options, name: &'static str, default: &str) -> Result<Grid, String> {
    let g = Grid::parse(name, o.grid.as_deref().unwrap_or(default))?;
    g.require_inside(0.0, 1.0)?;
    Ok(g)
}

fn threshold(o: &Options, ctx: &SobolevContext) -> Result<(f64, bool), String> {
    match o.threshold.as_deref().map(str::trim) {
        None | Some("c_loc") => Ok((ctx.c_loc(), true)),
        Some(t) => match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((v, false)),
            _ => Err(format!("--threshold '{t}' is neither a number nor 'c_loc'")),
        },
    }
}

fn reject(flags: &[(bool, &str)], command: &str) -> Result<(), String> {
    match flags.iter().find(|f| f.0) {
        Some((_, name)) => Err(format!("{name} does not apply to {command}")),
        None => Ok(()),
    }
}

fn method(ctx: &SobolevContext, family: Family, spectral: bool) -> Result<Method, String> {
    if !matches!(family, Family::TwoBubble | Family::SignChanging) {
        return Err(format!("family {} has no curve; use the expansion command", family.name()));
    }
    if spectral {
        return Ok(Method::Spectral);
    }
    let (p3, p4) = (ctx.has_exponent(3.0), ctx.has_exponent(4.0));
    match family {
        Family::TwoBubble if p3 || p4 => Ok(Method::Closed(Curve::TwoBubble)),
        Family::SignChanging if p4 => Ok(Method::Closed(Curve::SignChanging)),
        _ => Err(format!(
            "no closed form for {} with p = {}: closed forms need p = 3 or 4 (p = 4 for sign-changing); pass --spectral",
            family.name(),
            ctx.p()
        )),
    }
}

fn evaluate(ctx: &SobolevContext, cfg: &SpectralConfig, family: Family, m: Method, y: f64) -> stab_core::Result<Eval> {
    match m {
        Method::Closed(c) => {
            let p = curve_point(ctx, c, y)?;
            Ok(Eval { value: p.value, numerator: p.numerator, denominator: p.denominator, loc_margin: p.loc_margin })
        }
        Method::Spectral => {
            let u = family_function(ctx, cfg, family, beta_of_y(y))?;
            let r = modified_quotient(ctx, &u, family.name())?;
            Ok(Eval {
                value: r.e_tilde,
                numerator: r.deficit,
                denominator: r.dist_sq_c,
                loc_margin: r.deficit - ctx.c_loc() * r.dist_sq_c,
            })
        }
    }
}

/// Monotonicity asserted by the figures: `Some(true)` for increasing.
fn expected_trend(ctx: &SobolevContext, family: Family) -> Option<bool> {
    let (p3, p4) = (ctx.has_exponent(3.0), ctx.has_exponent(4.0));
    match (family, ctx.d()) {
        (Family::TwoBubble, 1) if p3 || p4 => Some(true),
        (Family::TwoBubble, 2) if p3 => Some(false),
        (Family::SignChanging, 1) if p4 => Some(false),
        _ => None,
    }
}

fn curve_label(ctx: &SobolevContext, m: Method, regularized: bool) -> String {
    let base = match m {
        Method::Closed(Curve::TwoBubble) if ctx.has_exponent(3.0) => "e",
        Method::Closed(Curve::TwoBubble) => "f",
        Method::Closed(_) => "g",
        Method::Spectral => "E_tilde",
    };
    if regularized {
        format!("{base}1(y) - c_loc {base}2(y)")
    } else {
        format!("{base}(y)")
    }
}

fn evaluate_grid(
    ctx: &SobolevContext,
    cfg: &SpectralConfig,
    family: Family,
    m: Method,
    ys: &[f64],
) -> Vec<stab_core::Result<Eval>> {
    ys.par_iter().map(|&y| evaluate(ctx, cfg, family, m, y)).collect()
}

fn provenance(
    command: &'static str,
    o: &Options,
    ctx: Option<&SobolevContext>,
    family: Family,
    method: &'static str,
    curve: Option<&'static str>,
    grid: Grid,
) -> Provenance {
    Provenance {
        tool: "stab",
        version: env!("CARGO_PKG_VERSION"),
        command,
        d: o.d,
        s: ctx.map(|c| c.s()),
        p: ctx.map(|c| c.p()),
        c_loc: ctx.map(|c| c.c_loc()),
        s_grid: None,
        family: family.name(),
        method,
        curve,
        grid,
        truncation: o.truncation,
        quad_order: o.quad_order,
        threshold: None,
        direction: None,
        regularized: o.regularized,
        tolerances: Tolerances {
            monotone_slack: MONOTONE_SLACK,
            monotone_from: MONOTONE_FROM,
            closed_form_agreement: CLOSED_FORM_AGREEMENT,
            fit_relative: FIT_RELATIVE,
            scaling_relative: SCALING_RELATIVE,
            search: None,
        },
    }
}

fn finish(report: VerificationReport, o: &Options) -> Outcome {
    emit(o.json.as_deref(), &to_json(&report))?;
    eprintln!("{}", report.summary());
    Ok(report.status)
}

pub fn curve(o: &Options) -> Outcome {
    reject(
        &[(o.json.is_some(), "--json"), (o.threshold.is_some(), "--threshold"), (o.direction.is_some(), "--direction")],
        "curve",
    )?;
    let ctx = context(o)?;
    let family = o.family.unwrap_or(Family::TwoBubble);
    let m = method(&ctx, family, o.spectral)?;
    let g = grid(o, "y", CURVE_GRID)?;
    let cfg = spectral_config(o)?;
    let mut rows = Vec::with_capacity(g.values.len());
    for (&y, r) in g.values.iter().zip(evaluate_grid(&ctx, &cfg, family, m, &g.values)) {
        let e = match r {
            Ok(e) => e,
            Err(err) => {
                eprintln!("curve: evaluation failed at y = {y}: {err}");
                return Ok(Status::Inconclusive);
            }
        };
        let value = if o.regularized { e.loc_margin } else { e.value };
        rows.push(vec![y, beta_of_y(y), value, e.numerator, e.denominator]);
    }
    if let Some(path) = &o.svg {
        let label = curve_label(&ctx, m, o.regularized);
        let title = format!("{label} for d = {}, s = {:.6}", ctx.d(), ctx.s());
        let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let vs: Vec<f64> = rows.iter().map(|r| r[2]).collect();
        emit(Some(path), &line_chart(&title, "y", &label, &xs, &vs))?;
    }
    emit(o.out.as_deref(), &to_csv(&["y", "beta", "value", "numerator", "denominator"], rows.into_iter()))?;
    Ok(Status::Pass)
}

pub fn verify(o: &Options) -> Outcome {
    reject(&[(o.svg.is_some(), "--svg")], "verify")?;
    let ctx = context(o)?;
    let family = o.family.unwrap_or(Family::TwoBubble);
    let m = method(&ctx, family, o.spectral)?;
    let g = grid(o, "y", CURVE_GRID)?;
    let cfg = spectral_config(o)?;
    let (t, is_c_loc) = threshold(o, &ctx)?;
    let direction = o.direction.unwrap_or(Direction::Above);
    let sign = if direction == Direction::Above { 1.0 } else { -1.0 };

    let mut points = Vec::new();
    let mut errors = Vec::new();
    for (&y, r) in g.values.iter().zip(evaluate_grid(&ctx, &cfg, family, m, &g.values)) {
        match r {
            Ok(e) => {
                let base = match (o.regularized, is_c_loc) {
                    (true, true) => e.loc_margin,
                    (true, false) => e.numerator - t * e.denominator,
                    (false, _) => e.value - t,
                };
                points.push(Point {
                    s: None,
                    parameter: y,
                    beta: Some(beta_of_y(y)),
                    value: e.value,
                    numerator: e.numerator,
                    denominator: e.denominator,
                    margin: sign * base,
                });
            }
            Err(err) => errors.push(format!("y = {y}: {err}")),
        }
    }
    let mut aggregate = Aggregate::of(&points);
    if let Some(increasing) = expected_trend(&ctx, family) {
        let checked: Vec<&Point> = points.iter().filter(|p| p.parameter >= MONOTONE_FROM).collect();
        let first_violation = checked
            .windows(2)
            .find(|w| {
                let step = if increasing { w[1].value - w[0].value } else { w[0].value - w[1].value };
                !(step > -MONOTONE_SLACK)
            })
            .map(|w| w[1].parameter);
        aggregate.monotonicity = Some(Monotonicity {
            expected: if increasing { "increasing" } else { "decreasing" },
            holds: first_violation.is_none(),
            first_violation,
        });
    }
    let mono_ok = aggregate.monotonicity.as_ref().is_none_or(|m| m.holds);
    let status = if !errors.is_empty() {
        Status::Inconclusive
    } else if aggregate.min_margin > 0.0 && mono_ok {
        Status::Pass
    } else {
        Status::Fail
    };
    if let Some(path) = &o.out {
        let rows = points.iter().map(|p| vec![p.parameter, p.beta.unwrap_or(f64::NAN), p.value, p.numerator, p.denominator]);
        emit(Some(path), &to_csv(&["y", "beta", "value", "numerator", "denominator"], rows))?;
    }
    let mut prov = provenance("verify", o, Some(&ctx), family, m.name(), m.curve_name(), g);
    prov.threshold = Some(t);
    prov.direction = Some(direction);
    finish(
        VerificationReport {
            status,
            pass: status == Status::Pass,
            provenance: prov,
            aggregate,
            rows: None,
            fit: None,
            errors,
            points,
        },
        o,
    )
}

fn s_grid(o: &Options) -> Result<Grid, String> {
    let spec = o.s.as_deref().unwrap_or(SCAN_S_GRID);
    let g = match spec.trim().parse::<f64>() {
        Ok(v) => Grid { name: "s", spec: spec.to_string(), values: vec![v] },
        Err(_) => Grid::parse("s", spec)?,
    };
    g.require_inside(0.0, 0.5)?;
    Ok(g)
}

pub fn scan_s(o: &Options) -> Outcome {
    reject(
        &[
            (o.p.is_some(), "--p"),
            (o.svg.is_some(), "--svg"),
            (o.threshold.is_some(), "--threshold"),
            (o.direction.is_some(), "--direction"),
            (o.regularized, "--regularized"),
        ],
        "scan-s",
    )?;
    if o.d != 1 {
        return Err(format!("scan-s runs on the circle (d = 1), got d = {}", o.d));
    }
    let family = o.family.unwrap_or(Family::TwoBubble);
    if family != Family::TwoBubble {
        return Err("scan-s uses the two-bubble family".into());
    }
    let sg = s_grid(o)?;
    let bg = grid(o, "beta", SCAN_BETA_GRID)?;
    let cfg = spectral_config(o)?;
    let contexts: Vec<SobolevContext> =
        sg.values.iter().map(|&s| SobolevContext::new(1, s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;

    let tasks: Vec<(usize, f64)> =
        (0..contexts.len()).flat_map(|i| bg.values.iter().map(move |&b| (i, b))).collect();
    let results: Vec<stab_core::Result<ScanSample>> = tasks
        .par_iter()
        .map(|&(i, beta)| {
            let ctx = &contexts[i];
            let u = family_function(ctx, &cfg, family, beta)?;
            let r = modified_quotient(ctx, &u, family.name())?;
            let closed = if ctx.has_exponent(3.0) || ctx.has_exponent(4.0) {
                Some(curve_point(ctx, Curve::TwoBubble, y_of_beta(beta))?.value)
            } else {
                None
            };
            Ok((r.e_tilde, r.deficit, r.dist_sq_c, closed))
        })
        .collect();

    let mut points = Vec::new();
    let mut errors = Vec::new();
    let mut rows = Vec::new();
    let mut cross_ok = true;
    for (i, ctx) in contexts.iter().enumerate() {
        let mut row = SRow {
            s: ctx.s(),
            p: ctx.p(),
            c_loc: ctx.c_loc(),
            min_value: f64::INFINITY,
            argmin_beta: f64::NAN,
            margin: f64::NAN,
            closed_form_max_diff: None,
        };
        for (&(j, beta), r) in tasks.iter().zip(&results) {
            if j != i {
                continue;
            }
            match r {
                Ok((e, num, den, closed)) => {
                    if *e < row.min_value {
                        row.min_value = *e;
                        row.argmin_beta = beta;
                    }
                    if let Some(c) = closed {
                        let diff = (e - c).abs();
                        row.closed_form_max_diff = Some(row.closed_form_max_diff.map_or(diff, |d: f64| d.max(diff)));
                    }
                    points.push(Point {
                        s: Some(ctx.s()),
                        parameter: beta,
                        beta: None,
                        value: *e,
                        numerator: *num,
                        denominator: *den,
                        margin: e - ctx.c_loc(),
                    });
                }
                Err(err) => errors.push(format!("s = {}, beta = {beta}: {err}", ctx.s())),
            }
        }
        row.margin = row.min_value - row.c_loc;
        cross_ok &= row.closed_form_max_diff.is_none_or(|d| d <= CLOSED_FORM_AGREEMENT);
        rows.push(row);
    }
    let aggregate = Aggregate::of(&points);
    let status = if !errors.is_empty() {
        Status::Inconclusive
    } else if aggregate.min_margin > 0.0 && cross_ok {
        Status::Pass
    } else {
        Status::Fail
    };
    if let Some(path) = &o.out {
        let csv_rows = points.iter().map(|p| vec![p.s.unwrap_or(f64::NAN), p.parameter, p.value, p.numerator, p.denominator]);
        emit(Some(path), &to_csv(&["s", "beta", "value", "numerator", "denominator"], csv_rows))?;
    }
    let mut prov = provenance("scan-s", o, None, family, "spectral", None, bg);
    prov.s_grid = Some(sg);
    prov.direction = Some(Direction::Above);
    finish(
        VerificationReport {
            status,
            pass: status == Status::Pass,
            provenance: prov,
            aggregate,
            rows: Some(rows),
            fit: None,
            errors,
            points,
        },
        o,
    )
}

/// Eliminate the `x²` term of `k(x) = k₀ + c x² + …` from two samples.
fn richardson(xa: f64, ka: f64, xb: f64, kb: f64) -> f64 {
    (xb * xb * ka - xa * xa * kb) / (xb * xb - xa * xa)
}

/// `(⟨u_β, ρ⟩/(β²⟨ρ, ρ⟩), (⨍u_β − 2)/β²)` for `u_β = v_β + v_{−β}`.
fn small_beta_samples(ctx: &SobolevContext, beta: f64) -> stab_core::Result<(f64, f64)> {
    let rule = gauss_legendre(PROJECTION_ORDER)?;
    let d = ctx.d();
    let u = family_profile(ctx, Family::TwoBubble, beta)?;
    let rho_sq = axial_integral(d, &rule, |t| rho_value(d, t).powi(2));
    let proj = axial_integral(d, &rule, |t| u(t.acos()) * rho_value(d, t));
    let mean = axial_integral(d, &rule, |t| u(t.acos())) / ctx.sphere_measure();
    Ok((proj / (rho_sq * beta * beta), (mean - 2.0) / (beta * beta)))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn expansion(o: &Options) -> Outcome {
    reject(&[(o.svg.is_some(), "--svg"), (o.regularized, "--regularized"), (o.spectral, "--spectral")], "expansion")?;
    let ctx = context(o)?;
    let family = o.family.unwrap_or(if ctx.d() == 1 { Family::SecondHarmonic } else { Family::Prop41Rho });
    let (name, default, min_points) = match family {
        Family::SecondHarmonic if ctx.d() == 1 => ("mu", SLOPE_GRID, 3),
        Family::SecondHarmonic => return Err("the second-harmonic family needs d = 1".into()),
        Family::Prop41Rho => ("epsilon", RHO_GRID, 2),
        other => return Err(format!("expansion supports second-harmonic and prop41-rho, got {}", other.name())),
    };
    let g = grid(o, name, default)?;
    if g.values.len() < min_points {
        return Err(format!("expansion with {} needs at least {min_points} grid points", family.name()));
    }
    let cfg = spectral_config(o)?;
    let (t, _) = threshold(o, &ctx)?;
    let default_dir = if family == Family::Prop41Rho && ctx.d() >= 2 { Direction::Below } else { Direction::Above };
    let direction = o.direction.unwrap_or(default_dir);
    let sign = if direction == Direction::Above { 1.0 } else { -1.0 };
    let opts = SearchOptions::default();

    let results: Vec<stab_core::Result<ExpansionSample>> = g
        .values
        .par_iter()
        .map(|&x| {
            let u = family_function(&ctx, &cfg, family, x)?;
            let r = be_quotient(&ctx, &u, family.name(), &opts)?;
            let converged = r.distance.is_some_and(|d| d.converged);
            Ok((r.e.unwrap_or(f64::NAN), r.deficit, r.dist_sq_m.unwrap_or(f64::NAN), converged))
        })
        .collect();
    let mut points = Vec::new();
    let mut errors = Vec::new();
    for (&x, r) in g.values.iter().zip(results) {
        match r {
            Ok((e, num, den, converged)) => {
                if !converged {
                    errors.push(format!("{name} = {x}: center search did not converge"));
                }
                points.push(Point {
                    s: None,
                    parameter: x,
                    beta: None,
                    value: e,
                    numerator: num,
                    denominator: den,
                    margin: sign * (e - t),
                });
            }
            Err(err) => errors.push(format!("{name} = {x}: {err}")),
        }
    }
    let aggregate = Aggregate::of(&points);
    let c_loc = ctx.c_loc();
    let mut fit_ok = true;
    let mut residual_ok = true;
    let fit = if errors.is_empty() {
        let xs: Vec<f64> = points.iter().map(|p| p.parameter).collect();
        let dev: Vec<f64> = points.iter().map(|p| p.value - c_loc).collect();
        match family {
            Family::SecondHarmonic => {
                let k: Vec<f64> = xs.iter().zip(&dev).map(|(x, d)| d / (x * x)).collect();
                let fitted = richardson(xs[0], k[0], xs[1], k[1]);
                let check = richardson(xs[1], k[1], xs[2], k[2]);
                let lc = local_quadratic_coefficient(&ctx).map_err(|e| e.to_string())?;
                let relative_deviation = rel(fitted, lc.exact);
                let residual = rel(check, fitted);
                fit_ok = relative_deviation <= FIT_RELATIVE;
                residual_ok = residual <= FIT_RELATIVE;
                Some(Fit::LocalSlope {
                    fitted,
                    check,
                    predicted: lc.exact,
                    lower_bound: lc.lower_bound,
                    relative_deviation,
                    residual,
                })
            }
            _ => {
                let exponents: Vec<f64> = (1..xs.len())
                    .map(|i| (dev[i] / dev[i - 1]).abs().ln() / (xs[i] / xs[i - 1]).ln())
                    .collect();
                let scaling_ok =
                    exponents.iter().all(|x| rel(*x, EXPECTED_EXPONENT) <= SCALING_RELATIVE);
                let (a0, b0) = small_beta_samples(&ctx, xs[0]).map_err(|e| e.to_string())?;
                let (a1, b1) = small_beta_samples(&ctx, xs[1]).map_err(|e| e.to_string())?;
                let c2_fitted = richardson(xs[0], a0, xs[1], a1);
                let c1_fitted = richardson(xs[0], b0, xs[1], b1);
                let sb = small_beta_coefficients(&ctx);
                let c2_dev = rel(c2_fitted, sb.c2);
                let c1_dev = rel(c1_fitted, sb.c1_quadratic);
                fit_ok = scaling_ok && c2_dev <= FIT_RELATIVE && c1_dev <= FIT_RELATIVE;
                Some(Fit::Prop41 {
                    exponents,
                    expected_exponent: EXPECTED_EXPONENT,
                    c2_fitted,
                    c2_predicted: sb.c2,
                    c2_relative_deviation: c2_dev,
                    c1_quadratic_fitted: c1_fitted,
                    c1_quadratic_predicted: sb.c1_quadratic,
                    c1_quadratic_relative_deviation: c1_dev,
                })
            }
        }
    } else {
        None
    };
    let status = if !errors.is_empty() || !residual_ok {
        Status::Inconclusive
    } else if aggregate.min_margin > 0.0 && fit_ok {
        Status::Pass
    } else {
        Status::Fail
    };
    if let Some(path) = &o.out {
        let rows = points.iter().map(|p| vec![p.parameter, p.value, p.numerator, p.denominator]);
        emit(Some(path), &to_csv(&[name, "value", "numerator", "denominator"], rows))?;
    }
    let mut prov = provenance("expansion", o, Some(&ctx), family, "spectral", None, g);
    prov.threshold = Some(t);
    prov.direction = Some(direction);
    prov.tolerances.search = Some(opts);
    finish(
        VerificationReport {
            status,
            pass: status == Status::Pass,
            provenance: prov,
            aggregate,
            rows: None,
            fit,
            errors,
            points,
        },
        o,
    )
}
