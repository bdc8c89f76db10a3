use serde::Serialize;

use crate::conformal::{lower_sphere_measure, SobolevContext};
use crate::error::{usage, Result};
use crate::specfun::wallis;

/// `ρ = ((d+1)t² − 1)/d`, the axisymmetric degree-2 harmonic with `ρ(±1) = 1`.
pub fn rho_value(d: usize, t: f64) -> f64 {
    let d = d as f64;
    ((d + 1.0) * t * t - 1.0) / d
}

/// `∫_{S^d} ρ³ dω = |S^{d−1}| · 8(d²−1)/(d³(d+2)(d+4)) · ∫₀^π sin^{d+5}θ dθ`.
pub fn rho_cubic_integral(d: usize) -> f64 {
    let df = d as f64;
    let coeff = 8.0 * (df * df - 1.0) / (df.powi(3) * (df + 2.0) * (df + 4.0));
    lower_sphere_measure(d) * coeff * wallis(d + 5)
}

/// `v_β + v_{−β} = c₁(β) + c₂β²ρ + o(β²)` with `c₁(β) = 2 + c1_quadratic·β² + o(β²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallBetaCoefficients {
    pub c1_quadratic: f64,
    pub c2: f64,
}

pub fn small_beta_coefficients(ctx: &SobolevContext) -> SmallBetaCoefficients {
    let d = ctx.d() as f64;
    let e = d / ctx.p();
    SmallBetaCoefficients {
        c1_quadratic: -e + e * (e + 1.0) / (d + 1.0),
        c2: e * (e + 1.0) * d / (d + 1.0),
    }
}

/// `μ²`-coefficients of `ℰ(1 + μ sin 2θ) − c_loc` on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalCoefficients {
    /// `α(1)(p−2)(p+1)/(16α(2))`
    pub exact: f64,
    /// `α(1)(p−2)(1+2s)/(192α(2))`
    pub lower_bound: f64,
}

pub fn local_quadratic_coefficient(ctx: &SobolevContext) -> Result<LocalCoefficients> {
    if ctx.d() != 1 {
        return usage(format!("local coefficient is defined for d = 1, got d = {}", ctx.d()));
    }
    let ratio = ctx.alpha(1) / ctx.alpha(2);
    let p = ctx.p();
    Ok(LocalCoefficients {
        exact: ratio * (p - 2.0) * (p + 1.0) / 16.0,
        lower_bound: ratio * (p - 2.0) * (1.0 + 2.0 * ctx.s()) / 192.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{axial_integral, Bubble};
    use crate::specfun::gauss_legendre;

    fn cubic_reference_d2() -> f64 {
        8.0 * std::f64::consts::PI / 35.0
    }

    #[test]
    fn rho_basics() {
        for d in 1..6 {
            assert!((rho_value(d, 1.0) - 1.0).abs() < 1e-15);
            assert!((rho_value(d, -1.0) - 1.0).abs() < 1e-15);
        }
        assert!((rho_value(2, 0.0) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn rho_has_zero_mean() {
        let rule = gauss_legendre(64).unwrap();
        for d in 1..8 {
            assert!(axial_integral(d, &rule, |t| rho_value(d, t)).abs() < 1e-13);
        }
    }

    #[test]
    fn cubic_integral() {
        assert_eq!(rho_cubic_integral(1), 0.0);
        assert!((rho_cubic_integral(2) - cubic_reference_d2()).abs() < 1e-15);
        // mpmath reference for d = 3.
        assert!((rho_cubic_integral(3) - 0.731_081_807_488_100_64).abs() < 1e-14);
        let rule = gauss_legendre(64).unwrap();
        for d in 2..=10 {
            let direct = axial_integral(d, &rule, |t| rho_value(d, t).powi(3));
            assert!(rho_cubic_integral(d) > 0.0);
            assert!((rho_cubic_integral(d) - direct).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn small_beta_expansion() {
        for (d, s) in [(1, 1.0 / 6.0), (2, 0.5), (3, 0.4)] {
            let ctx = SobolevContext::new(d, s).unwrap();
            let k = small_beta_coefficients(&ctx);
            let resid = |b: f64| {
                let (vp, vm) = (Bubble::new(b).unwrap(), Bubble::new(-b).unwrap());
                (0..=200)
                    .map(|i| {
                        let t = -1.0 + i as f64 / 100.0;
                        let u = vp.value(&ctx, t) + vm.value(&ctx, t);
                        (u - 2.0 - k.c1_quadratic * b * b - k.c2 * b * b * rho_value(d, t)).abs()
                    })
                    .fold(0.0, f64::max)
                    / (b * b)
            };
            let r: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|&b| resid(b)).collect();
            assert!(r[1] < 0.3 * r[0] && r[2] < 0.3 * r[1], "d={d}: {r:?}");
        }
        let ctx = SobolevContext::new(1, 1.0 / 6.0).unwrap();
        assert!((small_beta_coefficients(&ctx).c2 - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn local_coefficients() {
        for s in [0.05, 0.1, 1.0 / 6.0, 0.25, 0.4, 0.49] {
            let ctx = SobolevContext::new(1, s).unwrap();
            let k = local_quadratic_coefficient(&ctx).unwrap();
            assert!(k.exact > 0.0);
            assert!(k.lower_bound <= k.exact);
        }
        let ctx = SobolevContext::new(2, 0.5).unwrap();
        assert!(local_quadratic_coefficient(&ctx).is_err());
    }
}
