//! Special functions and quadrature used throughout the crate.

mod gamma;
mod gegenbauer;
mod hypergeometric;
mod quadrature;
mod wallis;

pub use gamma::log_gamma;
pub(crate) use gamma::ln_gamma_abs;
pub use gegenbauer::{chebyshev, gegenbauer, gegenbauer_all, gegenbauer_norm_sq};
pub use hypergeometric::{
    hyp2f1, hyp2f1_integral, hyp2f1_near_one, hyp2f1_series, hyp2f1_with, HypOptions, Hyp2F1Args,
    CROSS_CHECK_TOLERANCE,
};
pub use quadrature::{gauss_legendre, gauss_legendre_shared, QuadratureRule, MAX_ORDER};
pub use wallis::wallis;
