//! Synchronous coupling of a perturbed surface with its radial comparison
//! surface, plus the strong-error study of the radial gap.

use std::f64::consts::E;

use cartan::geometry::{comparison_profile, solve_jacobi, CurvatureProfile, Envelope};
use cartan::sde::{coupling_refinement, run_coupled_ensemble, McConfig, StepPolicy, StopSpec, DEFAULT_K_TOL};

fn main() -> cartan::Result<()> {
    let base = CurvatureProfile::constant(-1.0, 20.0)?;
    let p = CurvatureProfile::perturbed(base, 0.5, 3, Envelope::Ramp { start: 0.5, end: 1.5 })?;
    let jac = solve_jacobi(&p)?;
    let jac_t = solve_jacobi(&comparison_profile(&p, 1.0, E)?)?;

    let stop = StopSpec::to_radius(8.0);
    let mc = McConfig::new(1000, 3);
    let rep = run_coupled_ensemble((1.0, 0.0), &jac, &jac_t, &stop, &StepPolicy::default(), DEFAULT_K_TOL, &mc)?;
    println!(
        "{} coupled paths: min gap {:.3e}, tolerance {:.3e}, gap violations {}, <theta> violations {}",
        rep.n_paths, rep.min_gap, rep.tol_step, rep.gap_violations, rep.qv_violations
    );

    let mut short = StopSpec::to_radius(8.0);
    short.r_inner = Some(0.5);
    short.t_max = 2.0;
    let rr = coupling_refinement((1.0, 0.0), &jac, &jac_t, &short, 1e-2, 3, 16, &McConfig::new(200, 3))?;
    for (dt, e) in rr.dts.iter().zip(&rr.errors) {
        println!("dt = {dt:.4}: mean sup gap error {e:.3e}");
    }
    println!("halving ratios: {:?}", rr.ratios);
    Ok(())
}
