//! Curvature profiles, Jacobi fields and comparison geometry.

mod comparison;
mod jacobi;
mod profile;

pub use comparison::{
    ceiling_curvature, comparison_profile, jacobi_lower_bound, jacobi_lower_bound_with, upper_envelope,
    upper_envelope_with_rays, LowerBound, DEFAULT_BOUND_R_MAX,
};
pub use jacobi::{solve_jacobi, solve_jacobi_with, GridSpec, JacobiField, Local, DEFAULT_RAYS};
pub use profile::{CurvatureProfile, CurvatureValue, Envelope, ProfileKind};
