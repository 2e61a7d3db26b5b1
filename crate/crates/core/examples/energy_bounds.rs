//! Sector energies with certified tail bounds, and the Green-function energy
//! identity on the unit-disk model of the hyperbolic plane.

use cartan::estimates::{green_energy_annulus, sector_energy};
use cartan::geometry::{jacobi_lower_bound, solve_jacobi, CurvatureProfile};

fn main() -> cartan::Result<()> {
    let p = CurvatureProfile::threshold_default(2.0, 1e6)?;
    let jac = solve_jacobi(&p)?;
    // the threshold profile reaches the ceiling only past R + w
    let lb = jacobi_lower_bound(1.0, 2.0 * std::f64::consts::E)?;
    println!("A = {:.4}, C = {:.4}", lb.a, lb.c);
    for alpha in [10.0, 100.0] {
        for beta in [0.5, 1.5] {
            let s = sector_energy(&jac, alpha, beta, 0.0, Some(&lb))?;
            println!(
                "alpha = {alpha:>5}, beta = {beta}: energy <= {:.5} (quadrature {:.5} + tail {:.2e}), bound {:.5}",
                s.upper, s.quadrature, s.tail_bound, s.lemma_bound
            );
        }
    }
    for (a, b) in [(0.2, 0.8), (0.05, 0.95)] {
        let g = green_energy_annulus(a, b)?;
        println!("Green energy between levels {a} and {b}: {:.10} (expected {:.10})", g.energy, g.expected);
    }
    Ok(())
}
