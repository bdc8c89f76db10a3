//! Bianchi–Egnell stability quotients for the fractional Sobolev inequality
//! on the sphere `S^d`.
//!
//! The crate is layered bottom-up:
//!
//! * [`specfun`]: log-gamma, `₂F₁`, Gauss–Legendre rules, Gegenbauer
//!   polynomials and sine-power integrals.
//! * [`conformal`]: the Sobolev context `(d, s, p)`, eigenvalues of the
//!   conformally covariant operator, bubbles and their mass integrals.
//! * [`closedform`]: the explicit quotient curves of the two-bubble and
//!   sign-changing families and the small-parameter coefficients.
//! * [`spectral`]: an independent evaluator working from harmonic
//!   coefficients and quadrature, including the distance to the full
//!   optimizer manifold.

pub mod closedform;
pub mod conformal;
mod error;
pub mod spectral;
pub mod specfun;

pub use error::{Error, Result};
