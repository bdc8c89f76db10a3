//! Independent evaluator of the Bianchi–Egnell quotients from harmonic
//! coefficients and quadrature.
//!
//! Functions on the circle use the real Fourier basis; functions on `S^d`,
//! `d ≥ 2`, are axisymmetric and use orthonormalized Gegenbauer polynomials
//! in `t = cos θ`. Energies come from the coefficients, `L^p` integrals from
//! quadrature of the synthesized values.

mod distance;
mod families;
mod function;
mod quotient;

pub use distance::{
    dist_to_constants, dist_to_manifold, dist_to_manifold_with, DistanceResult, SearchOptions,
};
pub use families::{family_function, family_profile, Family};
pub use function::{
    analyze, analyze_with_order, apply_operator, energy, energy_inner, energy_nonconstant,
    lp_norm, Basis, SpectralConfig, SphereFunction,
};
pub use quotient::{be_quotient, deficit, modified_quotient, QuotientReport, DEGENERATE_RATIO};
