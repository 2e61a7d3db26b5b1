use cartan::estimates::{build_scale, hitting_probability_between};
use cartan::geometry::{solve_jacobi, CurvatureProfile, Envelope};
use cartan::sde::{
    run_ensemble, simulate_path, simulate_path_traced, McConfig, StepPolicy, StopReason, StopSpec,
};
use cartan::stats::{MeanEstimate, Proportion};

#[test]
fn quadratic_variation_matches_the_trace() {
    let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
    let stop = StopSpec::to_radius(6.0);
    let (rec, trace) = simulate_path_traced((1.0, 0.0), &jf, &stop, &StepPolicy::default(), 3, 1).unwrap();
    // left-point sum of dt / J(r)² along the recorded trajectory
    let sum: f64 = trace
        .windows(2)
        .map(|w| (w[1].t - w[0].t) / jf.j(w[0].r).powi(2))
        .sum();
    assert!((sum - rec.final_state.qv_theta).abs() <= 1e-9 * sum);
    assert_eq!(trace.len() as u64, rec.steps + 1);
    assert_eq!(trace.last().unwrap().qv, rec.final_state.qv_theta);
}

#[test]
fn radial_profiles_have_no_bounded_variation_part() {
    let jf = solve_jacobi(&CurvatureProfile::threshold_default(2.0, 1e3).unwrap()).unwrap();
    let rep = run_ensemble((5.0, 1.0), &jf, &StopSpec::to_radius(50.0), &StepPolicy::relative(), &McConfig::new(100, 2)).unwrap();
    assert!(rep.records.iter().all(|r| r.final_state.bv_theta == 0.0 && r.final_state.sup_bv == 0.0));
}

#[test]
fn angular_square_decomposes_into_martingale_and_drift() {
    // (θ−θ₀)² = M + A with M a martingale: E[M] ≈ 0 and E[(θ−θ₀)²] ≈ E[A]
    let base = CurvatureProfile::constant(-1.0, 12.0).unwrap();
    let p = CurvatureProfile::perturbed(base, 0.5, 2, Envelope::One).unwrap();
    let jf = solve_jacobi(&p).unwrap();
    let mut stop = StopSpec::to_radius(5.0);
    stop.r_inner = Some(0.5);
    let rep = run_ensemble((1.0, 0.4), &jf, &stop, &StepPolicy::default(), &McConfig::new(3000, 4)).unwrap();
    let mart: Vec<f64> = rep.records.iter().map(|r| r.final_state.sq_mart).collect();
    let gap: Vec<f64> = rep
        .records
        .iter()
        .map(|r| r.final_state.deviation().powi(2) - r.final_state.sq_mart - r.final_state.sq_drift)
        .collect();
    let m = MeanEstimate::from_samples(&mart);
    assert!(m.mean.abs() <= 4.0 * m.se(), "E[M] = {} ± {}", m.mean, m.se());
    // the pathwise remainder is the Itô discretization error only
    let g = MeanEstimate::from_samples(&gap);
    assert!(g.mean.abs() < 0.05 * MeanEstimate::from_samples(&rep.records.iter().map(|r| r.final_state.sq_drift).collect::<Vec<_>>()).mean);
}

#[test]
fn flat_plane_is_recurrent() {
    let jf = solve_jacobi(&CurvatureProfile::constant(0.0, 1e6).unwrap()).unwrap();
    let freq = |t_max: f64| {
        let mut stop = StopSpec::to_radius(1e6);
        stop.r_inner = Some(1.0);
        stop.t_max = t_max;
        let rep = run_ensemble((4.0, 0.0), &jf, &stop, &StepPolicy::relative(), &McConfig::new(400, 9)).unwrap();
        rep.outer.frequency(StopReason::HitInner)
    };
    let (a, b) = (freq(1e2), freq(1e6));
    assert!(b.p > a.p && b.separated_from(&a));
    assert!(b.p > 0.75);
}

#[test]
fn hyperbolic_hitting_frequency_matches_the_scale_function() {
    let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
    let mut stop = StopSpec::to_radius(8.0);
    stop.r_inner = Some(1.0);
    let rep = run_ensemble((3.0, 0.0), &jf, &stop, &StepPolicy::default(), &McConfig::new(4000, 12)).unwrap();
    let f: Proportion = rep.outer.frequency(StopReason::HitInner);
    let oracle = hitting_probability_between(&build_scale(&jf).unwrap(), 3.0, 1.0, 8.0).unwrap();
    assert!((f.p - oracle).abs() <= 3.0 * f.se().max(1e-3), "{} vs {oracle}", f.p);
}

#[test]
fn sector_exit_is_detected() {
    let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
    let mut stop = StopSpec::to_radius(10.0);
    stop.sector = Some(cartan::sde::Sector { center: 0.0, half_width: 0.2 });
    let rep = run_ensemble((1.0, 0.0), &jf, &stop, &StepPolicy::default(), &McConfig::new(200, 1)).unwrap();
    assert!(rep.outer.count(StopReason::ExitedSector) > 100);
    // paths that escape stayed inside the sector at every grid point
    for r in rep.records.iter().filter(|r| r.stop_reason == StopReason::ReachedInfinityProxy) {
        assert!(r.final_state.sup_dev < 0.2);
    }
    let single = simulate_path((1.0, 0.0), &jf, &stop, &StepPolicy::default(), 1, 0).unwrap();
    assert_eq!(single, rep.records[0]);
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
    let stop = StopSpec::to_radius(6.0).with_doubled_proxy();
    let run = |w| {
        let mut mc = McConfig::new(300, 77);
        mc.workers = Some(w);
        run_ensemble((1.0, 0.0), &jf, &stop, &StepPolicy::default(), &mc).unwrap()
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a, b);
}
