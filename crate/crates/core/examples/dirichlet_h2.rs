//! Monte Carlo harmonic extension on the hyperbolic plane, checked against the
//! Poisson integral.

use std::f64::consts::TAU;

use cartan::dirichlet::{exit_angle_histogram, poisson_cdf_h2, poisson_kernel_h2, sample_exits, BoundaryFunction, DirichletSettings};
use cartan::geometry::{solve_jacobi, CurvatureProfile};
use cartan::quadrature::{integrate, QuadOpts};
use cartan::sde::McConfig;

fn main() -> cartan::Result<()> {
    let jac = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0)?)?;
    let x = (1.5, 0.0);
    let sample = sample_exits(x, &jac, &DirichletSettings::new(8.0), &McConfig::new(4000, 11))?;
    for g in [BoundaryFunction::cos(1), BoundaryFunction::bump(0.0), BoundaryFunction::parse("pwl:0/1,3.14/-1")?] {
        let est = sample.estimate(&g);
        let exact = integrate(|t| g.eval(t) * poisson_kernel_h2(x.0, x.1, t), 0.0, TAU, QuadOpts::default())?.value;
        println!("{:<24} u = {:.4} ± {:.4}   Poisson integral {:.4}", g.to_config_string(), est.value, est.ci, exact);
    }
    let cdf = |t: f64| poisson_cdf_h2(x.0, x.1, t);
    let h = exit_angle_histogram(&sample, 24, Some(&cdf))?;
    println!("KS distance {:.4} (95% critical {:.4}), after doubling r_inf {:.4}", h.ks, h.ks_critical, h.ks_outer);
    Ok(())
}
