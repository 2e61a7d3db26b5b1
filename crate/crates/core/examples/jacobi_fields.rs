//! Jacobi fields for the built-in curvature families, and the comparison
//! machinery: upper envelope of a perturbed profile and a certified lower bound.

use std::f64::consts::E;

use cartan::geometry::{comparison_profile, jacobi_lower_bound, solve_jacobi, CurvatureProfile, Envelope};

fn main() -> cartan::Result<()> {
    let flat = solve_jacobi(&CurvatureProfile::constant(0.0, 20.0)?)?;
    let h2 = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0)?)?;
    let march = solve_jacobi(&CurvatureProfile::threshold_default(2.0, 1e4)?)?;

    println!("{:>8} {:>14} {:>14} {:>14}", "r", "J flat", "J (K=-1)", "J (c=2)");
    for r in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        println!("{r:>8} {:>14.6e} {:>14.6e} {:>14.6e}", flat.j(r), h2.j(r), march.j(r));
    }
    let err = (h2.j(10.0) - 10f64.sinh()).abs() / 10f64.sinh();
    println!("relative error against sinh at r = 10: {err:.2e}");

    // a perturbed surface and its radial comparison profile
    let base = CurvatureProfile::constant(-1.0, 30.0)?;
    let bumpy = CurvatureProfile::perturbed(base, 0.5, 3, Envelope::Ramp { start: 0.5, end: 1.5 })?;
    let tilde = comparison_profile(&bumpy, 1.0, E)?;
    let (jb, jt) = (solve_jacobi(&bumpy)?, solve_jacobi(&tilde)?);
    println!("\nperturbed surface (eta = 0.5, m = 3) against its comparison profile:");
    for r in [1.0, 2.0, 4.0, 8.0] {
        let k = jb.grid().partition_point(|&x| x < r).min(jb.grid().len() - 1);
        println!("  r = {:>6.3}: min over rays J = {:.5e} >= J~ = {:.5e}", jb.grid()[k], jb.min_over_rays(k), jt.j(jb.grid()[k]));
    }

    let lb = jacobi_lower_bound(1.0, E)?;
    println!("\ncertified bound J(r) >= r (log r)^2 / C for r > A: A = {:.4}, C = {:.4}", lb.a, lb.c);
    Ok(())
}
