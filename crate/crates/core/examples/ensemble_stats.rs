//! Ensemble statistics on a March threshold surface: stop reasons and the
//! probability that the angular quadratic variation exceeds δ, read at the
//! probe radius and at the doubled proxy.

use cartan::geometry::{solve_jacobi, CurvatureProfile};
use cartan::sde::{run_ensemble, McConfig, StepPolicy, StopReason, StopSpec};

fn main() -> cartan::Result<()> {
    let jac = solve_jacobi(&CurvatureProfile::threshold_default(2.0, 1e5)?)?;
    let mc = McConfig::new(2000, 7);
    println!("{:>6} {:>10} {:>22} {:>10}", "r0", "reached", "P(<theta> > 0.1)", "drift");
    for r0 in [10.0, 100.0, 1000.0] {
        let mut stop = StopSpec::to_radius(10.0 * r0).with_doubled_proxy();
        // transient surface: every path escapes, so no time cap is needed
        stop.t_max = f64::INFINITY;
        let rep = run_ensemble((r0, 0.0), &jac, &stop, &StepPolicy::relative(), &mc)?;
        let h = rep.headline();
        let p = &h.p_qv_exceed[1].prob;
        println!(
            "{r0:>6} {:>10} {:>8.4} [{:.4}, {:.4}] {:>+10.4}",
            h.count(StopReason::ReachedInfinityProxy),
            p.p,
            p.lo,
            p.hi,
            rep.qv_truncation_drift()[1]
        );
    }
    Ok(())
}
