//! Boundary continuity on a perturbed March surface: u(r, θ̂) approaches the
//! boundary value of a bump as r grows.

use cartan::dirichlet::{boundary_continuity_scan, BoundaryFunction, DirichletSettings};
use cartan::geometry::{solve_jacobi, CurvatureProfile, Envelope};
use cartan::sde::{McConfig, StepPolicy};

fn main() -> cartan::Result<()> {
    let base = CurvatureProfile::threshold(2.0, 1.1, 0.1, 2.1e4)?;
    let p = CurvatureProfile::perturbed(base, 0.3, 3, Envelope::One)?;
    let jac = solve_jacobi(&p)?;
    let g = BoundaryFunction::Bump { center: 1.0, half_width: 1.5 };
    let settings = DirichletSettings {
        policy: StepPolicy::relative(),
        ..DirichletSettings::new(1.0)
    };
    let rows = boundary_continuity_scan(1.0, &g, &jac, &[10.0, 100.0, 1000.0], 10.0, &settings, &McConfig::new(1000, 5))?;
    for row in rows {
        println!(
            "r = {:>6}: u = {:.4} ± {:.4}, P(sup|bv| > 0.05) = {:.4}",
            row.r, row.estimate.value, row.estimate.ci, row.supbv_exceed.p
        );
    }
    Ok(())
}
