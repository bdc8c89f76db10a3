//! Explicit quotient curves for the two-bubble and sign-changing families,
//! and the small-parameter coefficients of the local analysis.
//!
//! Every curve is parametrized by `y = 4β/(1+β)² ∈ (0, 1)`. Numerators and
//! denominators vanish to second order as `y → 0`, so they are assembled from
//! the mass defects `δ_q = 1 − m_q` rather than from `m_q` directly.

mod curves;
mod local;
mod precise;

pub use curves::{
    curve_limit_at_one, curve_near_one, curve_point, quotient_p3, quotient_p4,
    quotient_p4_signchanging, quotient_p4_signchanging_direct, Curve, CurvePoint,
    DEGENERATE_DENOMINATOR,
};
pub use local::{
    local_quadratic_coefficient, rho_cubic_integral, rho_value, small_beta_coefficients,
    LocalCoefficients, SmallBetaCoefficients,
};
pub use crate::conformal::{beta_of_y, y_of_beta};
