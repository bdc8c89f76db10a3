use std::str::FromStr;

use serde::Serialize;

use super::function::{analyze, SpectralConfig, SphereFunction};
use crate::closedform::rho_value;
use crate::conformal::{Bubble, SobolevContext};
use crate::error::{usage, Error, Result};

/// The one-parameter test families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `v_β + v_{−β}`
    TwoBubble,
    /// `v_β − v_{−β}`
    SignChanging,
    /// `1 + μ sin 2θ` on the circle
    SecondHarmonic,
    /// `1 + ερ`
    Prop41Rho,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::TwoBubble => "two-bubble",
            Family::SignChanging => "sign-changing",
            Family::SecondHarmonic => "second-harmonic",
            Family::Prop41Rho => "prop41-rho",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-bubble" => Ok(Family::TwoBubble),
            "sign-changing" => Ok(Family::SignChanging),
            "second-harmonic" => Ok(Family::SecondHarmonic),
            "prop41-rho" => Ok(Family::Prop41Rho),
            other => usage(format!("unknown family '{other}'")),
        }
    }
}

/// The family member as a function of the polar angle.
pub fn family_profile(
    ctx: &SobolevContext,
    family: Family,
    param: f64,
) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let ctx = *ctx;
    let d = ctx.d();
    Ok(match family {
        Family::TwoBubble | Family::SignChanging => {
            let (vp, vm) = (Bubble::new(param)?, Bubble::new(-param)?);
            let sign = if family == Family::TwoBubble { 1.0 } else { -1.0 };
            Box::new(move |th: f64| vp.value(&ctx, th.cos()) + sign * vm.value(&ctx, th.cos()))
        }
        Family::SecondHarmonic => {
            if d != 1 {
                return usage("the second-harmonic family lives on the circle (d = 1)");
            }
            Box::new(move |th: f64| 1.0 + param * (2.0 * th).sin())
        }
        Family::Prop41Rho => Box::new(move |th: f64| 1.0 + param * rho_value(d, th.cos())),
    })
}

/// Expansion of the family member.
pub fn family_function(
    ctx: &SobolevContext,
    cfg: &SpectralConfig,
    family: Family,
    param: f64,
) -> Result<SphereFunction> {
    let f = family_profile(ctx, family, param)?;
    analyze(ctx, cfg, f)
}
