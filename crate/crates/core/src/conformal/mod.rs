//! The Sobolev framework on `S^d`: contexts, eigenvalues of the conformally
//! covariant operator `P_s`, bubbles, their mass integrals and stereographic
//! transport.

mod bubble;
mod context;
mod mass;

pub use bubble::{
    beta_from_gamma, beta_of_lambda, bubble_value, gamma_compose, lambda_of_beta, plane_bubble,
    to_plane, Bubble,
};
pub use context::{axial_integral, lower_sphere_measure, make_context, SobolevContext};
pub use mass::{
    bubble_mass, m2_of_y, m_of_y, m_q_near_one, m_q_of_y, mass_defect, mass_defect_of_y,
    two_bubble_limit, y_of_beta, beta_of_y,
};
