//! The Dirichlet problem at infinity: boundary data, Monte Carlo harmonic
//! extension, exit laws, and a finite-difference Laplacian for checks.

mod boundary;
mod laplacian;
mod poisson;
mod solver;

pub use boundary::{wrap_angle, BoundaryFunction, DEFAULT_BUMP_HALF_WIDTH};
pub use laplacian::{laplacian_apply, stencil_weight, PolarGrid};
pub use poisson::{poisson_cdf_h2, poisson_kernel_h2};
pub use solver::{
    boundary_continuity_scan, exit_angle_histogram, sample_exits, solve_dirichlet, DirichletSettings, ExitHistogram,
    ExitSample, HarmonicEstimate, ScanRow, MAX_EXCLUDED_FRACTION,
};
