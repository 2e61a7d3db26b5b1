//! One traced path on the hyperbolic plane, printed as CSV on stdout.

use cartan::geometry::{solve_jacobi, CurvatureProfile};
use cartan::sde::{simulate_path_traced, StepPolicy, StopSpec};

fn main() -> cartan::Result<()> {
    let jac = solve_jacobi(&CurvatureProfile::constant(-1.0, 30.0)?)?;
    let stop = StopSpec::to_radius(10.0);
    let (rec, trace) = simulate_path_traced((1.0, 0.0), &jac, &stop, &StepPolicy::default(), 42, 0)?;
    println!("t,r,theta,qv,bv");
    for row in trace.iter().step_by(50) {
        println!("{},{},{},{},{}", row.t, row.r, row.theta, row.qv, row.bv);
    }
    eprintln!(
        "stopped: {} after {} steps at t = {:.3}, exit angle {:.4}, <theta> = {:.4}",
        rec.stop_reason.as_str(),
        rec.steps,
        rec.final_state.t,
        rec.final_state.angle(),
        rec.final_state.qv_theta
    );
    Ok(())
}
