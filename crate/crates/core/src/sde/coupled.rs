//! Synchronous coupling of a path with its radial comparison process.
//!
//! Both radial components are driven by the same `W` (and the angles by the
//! same `W̃`) with a common step, so the comparison `r ≥ r̃` can be checked
//! pathwise.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::path::{advance, bridge_crossed, drifts, PathRecord, PathState, StepOutcome, StepPolicy, StopReason, StopSpec};
use crate::error::{Error, Result};
use crate::geometry::JacobiField;
use crate::parallel::with_workers;
use crate::rng::{path_rng, word_pos};

/// One coupled pair. `tilde` is the comparison process sampled when the true path stops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledRecord {
    pub path: PathRecord,
    pub tilde: PathRecord,
    /// `min_t (r_t − r̃_t)`, including `t = 0`.
    pub min_gap: f64,
}

fn check_pair(jacobi: &JacobiField, tilde: &JacobiField, stop: &StopSpec, stop_tilde: &StopSpec) -> Result<()> {
    if stop != stop_tilde {
        return Err(Error::config("stop", "coupled processes need identical stop specifications"));
    }
    if !tilde.is_radial() {
        return Err(Error::precondition("simulate_coupled", "comparison field must be radial"));
    }
    if tilde.r_max() < stop.r_inf.min(jacobi.r_max()) {
        return Err(Error::config("stop.r_inf", "comparison field does not reach r_inf"));
    }
    Ok(())
}

/// Runs the pair until the true path meets a stopping rule.
#[allow(clippy::too_many_arguments)]
pub fn simulate_coupled(
    start: (f64, f64),
    jacobi: &JacobiField,
    jacobi_tilde: &JacobiField,
    stop: &StopSpec,
    stop_tilde: &StopSpec,
    policy: &StepPolicy,
    seed: u64,
    stream: u64,
) -> Result<CoupledRecord> {
    check_pair(jacobi, jacobi_tilde, stop, stop_tilde)?;
    stop.validate(start.0, jacobi)?;
    policy.validate()?;
    Ok(run_coupled(start, jacobi, jacobi_tilde, stop, policy, seed, stream))
}

fn run_coupled(
    start: (f64, f64),
    jacobi: &JacobiField,
    jt: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    seed: u64,
    stream: u64,
) -> CoupledRecord {
    let mut rng = path_rng(seed, stream);
    let mut s = PathState::start(start.0, start.1);
    let mut st = s;
    let mut min_gap = 0.0f64;
    let mut steps = 0u64;
    let (reason, cap) = loop {
        if steps >= stop.max_steps {
            break (StopReason::TimeCap, true);
        }
        let l = jacobi.local(s.r, s.theta);
        let lt = jt.local(st.r, st.theta);
        let (b_r, b_t, inv_j2) = drifts(&l);
        let (bt_r, bt_t, _) = drifts(&lt);
        let mut dt = policy
            .dt(s.r, b_r, b_t)
            .min(policy.dt(st.r, bt_r, bt_t))
            .min(stop.t_max - s.t);
        if stop.qv_max.is_finite() {
            dt = dt.min((stop.qv_max - s.qv_theta) / inv_j2);
        }
        let sq = dt.sqrt();
        let dw = (sq * rng.sample::<f64, _>(StandardNormal), sq * rng.sample::<f64, _>(StandardNormal));
        let out = advance(&s, &l, dt, dw);
        let out_t = advance(&st, &lt, dt, dw);
        steps += 1;
        let prev = s;
        s = *out.state();
        st = *out_t.state();
        min_gap = min_gap.min(s.r - st.r);
        if matches!(out, StepOutcome::Floored(_)) || matches!(out_t, StepOutcome::Floored(_)) {
            break (StopReason::NumericalFloor, false);
        }
        if let Some(a) = stop.r_inner {
            if bridge_crossed(prev.r - a, s.r - a, dt, &mut rng) {
                break (StopReason::HitInner, false);
            }
        }
        if let Some(sec) = stop.sector {
            let var = dt * inv_j2;
            let (u0, u1) = (prev.theta - sec.center, s.theta - sec.center);
            let hw = sec.half_width;
            if bridge_crossed(hw - u0, hw - u1, var, &mut rng) || bridge_crossed(hw + u0, hw + u1, var, &mut rng) {
                break (StopReason::ExitedSector, false);
            }
        }
        if bridge_crossed(stop.r_inf - prev.r, stop.r_inf - s.r, dt, &mut rng) {
            break (StopReason::ReachedInfinityProxy, false);
        }
        if s.qv_theta >= stop.qv_max * (1.0 - 1e-12) {
            break (StopReason::QvCap, false);
        }
        if s.t >= stop.t_max {
            break (StopReason::TimeCap, false);
        }
    };
    s.stream_pos = word_pos(&rng);
    st.stream_pos = s.stream_pos;
    let rec = |state: PathState| PathRecord {
        stop_reason: reason,
        final_state: state,
        probe: None,
        steps,
        stream_id: stream,
        step_cap_hit: cap,
    };
    CoupledRecord {
        path: rec(s),
        tilde: rec(st),
        min_gap,
    }
}

/// Summary of a coupled ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledReport {
    pub n_paths: usize,
    pub seed: u64,
    /// `K_tol·√dt_max`.
    pub tol_step: f64,
    pub min_gap: f64,
    /// Paths with `min_gap < −tol_step`.
    pub gap_violations: u64,
    /// Paths whose `⟨θ⟩` exceeds `∫ 1/J̃(r̃)²` beyond rounding.
    pub qv_violations: u64,
    pub floored: u64,
    #[serde(skip)]
    pub records: Vec<CoupledRecord>,
}

pub const DEFAULT_K_TOL: f64 = 1.0;

#[allow(clippy::too_many_arguments)]
pub fn run_coupled_ensemble(
    start: (f64, f64),
    jacobi: &JacobiField,
    jacobi_tilde: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    k_tol: f64,
    mc: &super::McConfig,
) -> Result<CoupledReport> {
    mc.validate()?;
    check_pair(jacobi, jacobi_tilde, stop, stop)?;
    stop.validate(start.0, jacobi)?;
    policy.validate()?;
    let records: Vec<CoupledRecord> = with_workers(mc.workers, || {
        (0..mc.n_paths as u64)
            .into_par_iter()
            .map(|i| run_coupled(start, jacobi, jacobi_tilde, stop, policy, mc.seed, mc.stream_offset + i))
            .collect()
    })?;
    let tol_step = k_tol * policy.dt_max.sqrt();
    let live = || records.iter().filter(|c| c.path.stop_reason != StopReason::NumericalFloor);
    Ok(CoupledReport {
        n_paths: records.len(),
        seed: mc.seed,
        tol_step,
        min_gap: live().map(|c| c.min_gap).fold(0.0, f64::min),
        gap_violations: live().filter(|c| c.min_gap < -tol_step).count() as u64,
        qv_violations: live()
            .filter(|c| c.path.final_state.qv_theta > c.tilde.final_state.qv_theta * (1.0 + 1e-12))
            .count() as u64,
        floored: records.len() as u64 - live().count() as u64,
        records,
    })
}

/// Strong-error study of the coupling gap under step halving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementReport {
    pub dts: Vec<f64>,
    /// Mean over paths of `sup_t |gap_dt(t) − gap_ref(t)|` on the coarsest time grid.
    pub errors: Vec<f64>,
    /// `errors[k] / errors[k+1]`.
    pub ratios: Vec<f64>,
    pub dt_ref: f64,
    pub n_paths: usize,
}

/// Fixed-step coupled runs at `dt, dt/2, …` (`levels` of them) against a reference
/// at `dt/ref_factor`, all on the same Brownian path. Paths are compared over the
/// coarse time grid up to the first time any level leaves `(r_inner, r_inf)`.
#[allow(clippy::too_many_arguments)]
pub fn coupling_refinement(
    start: (f64, f64),
    jacobi: &JacobiField,
    jacobi_tilde: &JacobiField,
    stop: &StopSpec,
    dt: f64,
    levels: u32,
    ref_factor: u32,
    mc: &super::McConfig,
) -> Result<RefinementReport> {
    mc.validate()?;
    check_pair(jacobi, jacobi_tilde, stop, stop)?;
    stop.validate(start.0, jacobi)?;
    if !(dt > 0.0 && stop.t_max.is_finite()) {
        return Err(Error::config("stop.t_max", "refinement needs a finite horizon and positive dt"));
    }
    if levels == 0 || !ref_factor.is_power_of_two() || ref_factor < (1 << levels) {
        return Err(Error::config("refinement.ref_factor", "must be a power of two finer than every level"));
    }
    let n_coarse = (stop.t_max / dt).ceil() as usize;
    let h_ref = dt / ref_factor as f64;
    let n_fine = n_coarse * ref_factor as usize;
    let inner = stop.r_inner.unwrap_or(super::path::R_FLOOR);

    let per_path: Vec<Vec<f64>> = with_workers(mc.workers, || {
        (0..mc.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(mc.seed, mc.stream_offset + i);
                let z: Vec<(f64, f64)> = (0..n_fine)
                    .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect();
                let gap_at = |block: usize| -> Vec<f64> {
                    let h = h_ref * block as f64;
                    let sq = h_ref.sqrt();
                    let per_coarse = ref_factor as usize / block;
                    let mut s = PathState::start(start.0, start.1);
                    let mut st = s;
                    let mut gaps = Vec::with_capacity(n_coarse);
                    'outer: for c in 0..n_coarse {
                        for b in 0..per_coarse {
                            let k0 = (c * per_coarse + b) * block;
                            let dw = z[k0..k0 + block]
                                .iter()
                                .fold((0.0, 0.0), |a, w| (a.0 + sq * w.0, a.1 + sq * w.1));
                            let o = advance(&s, &jacobi.local(s.r, s.theta), h, dw);
                            let ot = advance(&st, &jacobi_tilde.local(st.r, st.theta), h, dw);
                            s = *o.state();
                            st = *ot.state();
                            let out = |r: f64| r <= inner || r >= stop.r_inf;
                            if out(s.r) || out(st.r) {
                                break 'outer;
                            }
                        }
                        gaps.push(s.r - st.r);
                    }
                    gaps
                };
                let reference = gap_at(1);
                let mut errs = Vec::with_capacity(levels as usize);
                let runs: Vec<Vec<f64>> = (0..levels).map(|k| gap_at(ref_factor as usize >> k)).collect();
                let common = runs.iter().map(Vec::len).chain([reference.len()]).min().unwrap_or(0);
                for run in &runs {
                    let e = (0..common).map(|j| (run[j] - reference[j]).abs()).fold(0.0, f64::max);
                    errs.push(e);
                }
                errs
            })
            .collect()
    })?;

    let n = per_path.len() as f64;
    let errors: Vec<f64> = (0..levels as usize)
        .map(|k| per_path.iter().map(|e| e[k]).sum::<f64>() / n)
        .collect();
    Ok(RefinementReport {
        dts: (0..levels).map(|k| dt / (1u32 << k) as f64).collect(),
        ratios: errors.windows(2).map(|w| w[0] / w[1]).collect(),
        errors,
        dt_ref: h_ref,
        n_paths: mc.n_paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{comparison_profile, solve_jacobi, CurvatureProfile, Envelope};
    use crate::sde::McConfig;

    #[test]
    fn self_comparison_is_identical() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
        let mut stop = StopSpec::to_radius(6.0);
        stop.r_inner = Some(0.5);
        let c = simulate_coupled((1.0, 0.0), &jf, &jf, &stop, &stop, &StepPolicy::default(), 4, 2).unwrap();
        assert_eq!(c.path.final_state, c.tilde.final_state);
        assert_eq!(c.min_gap, 0.0);
    }

    #[test]
    fn mismatched_stops_rejected() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap();
        let a = StopSpec::to_radius(6.0);
        let b = StopSpec::to_radius(7.0);
        let r = simulate_coupled((1.0, 0.0), &jf, &jf, &a, &b, &StepPolicy::default(), 0, 0);
        assert!(matches!(r, Err(Error::Config { .. })));
    }

    #[test]
    fn perturbed_pair_is_ordered() {
        let base = CurvatureProfile::constant(-1.0, 10.0).unwrap();
        let p = CurvatureProfile::perturbed(base, 0.5, 3, Envelope::One).unwrap();
        let jf = solve_jacobi(&p).unwrap();
        let jt = solve_jacobi(&comparison_profile(&p, 1.0, std::f64::consts::E).unwrap()).unwrap();
        let stop = StopSpec::to_radius(6.0);
        let mut mc = McConfig::new(50, 1);
        mc.workers = Some(1);
        let rep = run_coupled_ensemble((1.0, 0.3), &jf, &jt, &stop, &StepPolicy::default(), 1.0, &mc).unwrap();
        assert_eq!(rep.gap_violations, 0);
        assert_eq!(rep.qv_violations, 0);
        assert!(rep.min_gap >= -1e-9);
    }
}
