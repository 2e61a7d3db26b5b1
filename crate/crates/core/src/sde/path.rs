//! Euler–Maruyama integration of the polar SDEs
//! `dr = dW + ½(∂rJ/J)dt`, `dθ = (1/J)dW̃ − ½(∂θJ/J³)dt`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{JacobiField, Local};
use crate::rng::{path_rng, word_pos, PathRng};

/// Radius below which a path is abandoned as a discretization artifact.
pub const R_FLOOR: f64 = 1e-6;

/// Live state of one path. `theta` is unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub theta0: f64,
    /// `⟨θ⟩ = ∫ 1/J² ds`.
    pub qv_theta: f64,
    /// `−½∫ ∂θJ/J³ ds`; identically zero on radial surfaces.
    pub bv_theta: f64,
    pub sup_dev: f64,
    pub sup_bv: f64,
    /// `Σ 2(θ−θ₀)·dθ^mart`, the martingale part of `(θ−θ₀)²`.
    pub sq_mart: f64,
    /// `Σ (2(θ−θ₀)·b_θ + 1/J²)·dt`, its finite-variation part.
    pub sq_drift: f64,
    pub stream_pos: u64,
}

impl PathState {
    pub fn start(r: f64, theta: f64) -> Self {
        PathState {
            t: 0.0,
            r,
            theta,
            theta0: theta,
            qv_theta: 0.0,
            bv_theta: 0.0,
            sup_dev: 0.0,
            sup_bv: 0.0,
            sq_mart: 0.0,
            sq_drift: 0.0,
            stream_pos: 0,
        }
    }

    pub fn deviation(&self) -> f64 {
        self.theta - self.theta0
    }

    /// Angle reduced to `[0, 2π)`.
    pub fn angle(&self) -> f64 {
        self.theta.rem_euclid(TAU)
    }
}

/// Drift coefficients `(b_r, b_θ)` and angular diffusivity `1/J²`.
#[inline]
pub fn drifts(l: &Local) -> (f64, f64, f64) {
    let inv_j = 1.0 / l.j;
    let inv_j2 = inv_j * inv_j;
    (0.5 * l.dj_dr * inv_j, -0.5 * l.dj_dtheta * inv_j2 * inv_j, inv_j2)
}

/// `dt = min(dt_max, (δ_r·r)², c_drift·r/|b_r|, c_drift/|b_θ|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepPolicy {
    pub dt_max: f64,
    pub delta_r: f64,
    pub c_drift: f64,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            dt_max: 1e-2,
            delta_r: 0.05,
            c_drift: 0.1,
        }
    }
}

impl StepPolicy {
    /// Constant step `dt` everywhere.
    pub fn fixed(dt: f64) -> Self {
        StepPolicy {
            dt_max: dt,
            delta_r: f64::INFINITY,
            c_drift: f64::INFINITY,
        }
    }

    /// Purely scale-relative steps, for runs far from the pole.
    pub fn relative() -> Self {
        StepPolicy {
            dt_max: f64::INFINITY,
            ..Default::default()
        }
    }

    #[inline]
    pub fn dt(&self, r: f64, b_r: f64, b_theta: f64) -> f64 {
        let dr = self.delta_r * r;
        self.dt_max
            .min(dr * dr)
            .min(self.c_drift * r / b_r.abs())
            .min(self.c_drift / b_theta.abs())
    }

    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("policy.dt_max", self.dt_max),
            ("policy.delta_r", self.delta_r),
            ("policy.c_drift", self.c_drift),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.dt_max.is_finite() || self.delta_r.is_finite() || self.c_drift.is_finite()) {
            return Err(Error::config("policy.dt_max", "every step bound is infinite"));
        }
        Ok(())
    }
}

/// Angular sector `|θ − center| < half_width` in the unwrapped coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector {
    pub center: f64,
    pub half_width: f64,
}

/// Stopping rules for a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopSpec {
    /// Infinity proxy: the path counts as converged on reaching it.
    pub r_inf: f64,
    /// Intermediate radius whose first crossing is snapshotted (truncation check).
    pub r_probe: Option<f64>,
    pub r_inner: Option<f64>,
    pub sector: Option<Sector>,
    pub t_max: f64,
    pub qv_max: f64,
    pub max_steps: u64,
}

impl StopSpec {
    pub fn to_radius(r_inf: f64) -> Self {
        StopSpec {
            r_inf,
            r_probe: None,
            r_inner: None,
            sector: None,
            t_max: 1e4,
            qv_max: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }

    /// Runs to `2·r_inf` and snapshots the first passage of `r_inf`.
    pub fn with_doubled_proxy(mut self) -> Self {
        self.r_probe = Some(self.r_inf);
        self.r_inf *= 2.0;
        self
    }

    pub fn validate(&self, r0: f64, jacobi: &JacobiField) -> Result<()> {
        if !(r0 > R_FLOOR) {
            return Err(Error::config("start.r", format!("start radius must exceed {R_FLOOR}, got {r0}")));
        }
        if !(self.r_inf > r0) {
            return Err(Error::config("stop.r_inf", format!("r_inf = {} must exceed the start radius {r0}", self.r_inf)));
        }
        if self.r_inf > jacobi.r_max() {
            return Err(Error::config(
                "stop.r_inf",
                format!("r_inf = {} exceeds the Jacobi table range r_max = {}", self.r_inf, jacobi.r_max()),
            ));
        }
        if let Some(a) = self.r_inner {
            if !(a > R_FLOOR && a < r0) {
                return Err(Error::config("stop.r_inner", format!("need {R_FLOOR} < r_inner < r0 = {r0}, got {a}")));
            }
        }
        if let Some(p) = self.r_probe {
            if !(p > r0 && p < self.r_inf) {
                // the probe is the configured r_inf once the proxy is doubled
                return Err(Error::config("stop.r_inf", format!("need r0 < r_probe < r_inf, got r_probe = {p}, r0 = {r0}")));
            }
        }
        if let Some(s) = self.sector {
            if !(s.half_width > 0.0 && s.half_width < PI) {
                return Err(Error::config("stop.beta", format!("half-width must lie in (0, π), got {}", s.half_width)));
            }
        }
        if !(self.t_max > 0.0) {
            return Err(Error::config("stop.t_max", format!("must be positive, got {}", self.t_max)));
        }
        if !(self.qv_max > 0.0) {
            return Err(Error::config("stop.qv_max", format!("must be positive, got {}", self.qv_max)));
        }
        if self.max_steps == 0 {
            return Err(Error::config("stop.max_steps", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StopReason {
    ReachedInfinityProxy,
    HitInner,
    ExitedSector,
    TimeCap,
    QvCap,
    NumericalFloor,
}

impl StopReason {
    pub const ALL: [StopReason; 6] = [
        StopReason::ReachedInfinityProxy,
        StopReason::HitInner,
        StopReason::ExitedSector,
        StopReason::TimeCap,
        StopReason::QvCap,
        StopReason::NumericalFloor,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::ReachedInfinityProxy => "reached_infinity_proxy",
            StopReason::HitInner => "hit_inner",
            StopReason::ExitedSector => "exited_sector",
            StopReason::TimeCap => "time_cap",
            StopReason::QvCap => "qv_cap",
            StopReason::NumericalFloor => "numerical_floor",
        }
    }

    /// Stops caused by a cap rather than by an event of the process.
    pub fn is_cap(&self) -> bool {
        matches!(self, StopReason::TimeCap | StopReason::QvCap)
    }
}

/// Terminal summary of one path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub stop_reason: StopReason,
    pub final_state: PathState,
    /// State at the first passage of `r_probe`, if it happened.
    pub probe: Option<PathState>,
    pub steps: u64,
    pub stream_id: u64,
    /// The hard step cap (not `t_max`) ended the path.
    pub step_cap_hit: bool,
}

impl PathRecord {
    /// The record as it would have been with `r_inf = r_probe`.
    pub fn truncated(&self) -> (StopReason, &PathState) {
        match &self.probe {
            Some(p) => (StopReason::ReachedInfinityProxy, p),
            None => (self.stop_reason, &self.final_state),
        }
    }
}

/// One trajectory sample for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub qv: f64,
    pub bv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Moved(PathState),
    /// The update would have put `r` at or below [`R_FLOOR`].
    Floored(PathState),
}

impl StepOutcome {
    pub fn state(&self) -> &PathState {
        match self {
            StepOutcome::Moved(s) | StepOutcome::Floored(s) => s,
        }
    }
}

/// One Euler–Maruyama step with standard Gaussian `noise = (z_r, z_θ)`.
pub fn step(state: &PathState, jacobi: &JacobiField, dt: f64, noise: (f64, f64)) -> StepOutcome {
    let l = jacobi.local(state.r, state.theta);
    let sq = dt.sqrt();
    advance(state, &l, dt, (sq * noise.0, sq * noise.1))
}

/// Euler update given the local metric and Brownian increments `dw = (ΔW, ΔW̃)`.
#[inline]
pub(crate) fn advance(s: &PathState, l: &Local, dt: f64, dw: (f64, f64)) -> StepOutcome {
    let (b_r, b_theta, inv_j2) = drifts(l);
    let dev = s.theta - s.theta0;
    let d_mart = dw.1 / l.j;
    let d_bv = b_theta * dt;
    let mut n = *s;
    n.t = s.t + dt;
    n.r = s.r + b_r * dt + dw.0;
    n.theta = s.theta + d_bv + d_mart;
    n.qv_theta = s.qv_theta + dt * inv_j2;
    n.bv_theta = s.bv_theta + d_bv;
    n.sup_dev = s.sup_dev.max((n.theta - n.theta0).abs());
    n.sup_bv = s.sup_bv.max(n.bv_theta.abs());
    n.sq_mart = s.sq_mart + 2.0 * dev * d_mart;
    n.sq_drift = s.sq_drift + (2.0 * dev * b_theta + inv_j2) * dt;
    if n.r <= R_FLOOR {
        StepOutcome::Floored(n)
    } else {
        StepOutcome::Moved(n)
    }
}

/// Below this radius paths are stepped in Cartesian coordinates of the normal
/// chart, where the metric is flat to `O(K r²)`. Polar steps shrink like `r²`
/// there and would crawl into the pole; chart steps pass by it.
pub const POLE_CHART_RADIUS: f64 = 1e-2;

/// Step inside the pole chart. The displacement `(ΔW + extra drift, r(ΔW̃/J + b_θ dt))`
/// is taken in the frame aligned with the current ray; flat Brownian motion
/// already carries the `1/(2r)` part of the radial drift.
#[inline]
pub(crate) fn advance_chart(s: &PathState, l: &Local, dt: f64, dw: (f64, f64)) -> StepOutcome {
    let (b_r, b_theta, inv_j2) = drifts(l);
    let dev = s.theta - s.theta0;
    let d_bv = b_theta * dt;
    let u = s.r + dw.0 + (b_r - 0.5 / s.r) * dt;
    let v = s.r * (dw.1 / l.j + d_bv);
    let d_theta = v.atan2(u);
    let mut n = *s;
    n.t = s.t + dt;
    n.r = u.hypot(v);
    n.theta = s.theta + d_theta;
    n.qv_theta = s.qv_theta + dt * inv_j2;
    n.bv_theta = s.bv_theta + d_bv;
    n.sup_dev = s.sup_dev.max((n.theta - n.theta0).abs());
    n.sup_bv = s.sup_bv.max(n.bv_theta.abs());
    n.sq_mart = s.sq_mart + 2.0 * dev * (d_theta - d_bv);
    n.sq_drift = s.sq_drift + (2.0 * dev * b_theta + inv_j2) * dt;
    if n.r <= R_FLOOR {
        StepOutcome::Floored(n)
    } else {
        StepOutcome::Moved(n)
    }
}

/// Brownian-bridge test for a crossing between two in-domain endpoints at
/// distances `d0`, `d1` from a barrier, for increment variance `var`.
#[inline]
pub(crate) fn bridge_crossed(d0: f64, d1: f64, var: f64, rng: &mut PathRng) -> bool {
    if d0 <= 0.0 || d1 <= 0.0 {
        return true;
    }
    let p = (-2.0 * d0 * d1 / var).exp();
    p > 1e-15 && rng.gen::<f64>() < p
}

/// Simulates one path from `start = (r₀, θ₀)` until a stopping rule fires.
pub fn simulate_path(
    start: (f64, f64),
    jacobi: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    seed: u64,
    stream: u64,
) -> Result<PathRecord> {
    stop.validate(start.0, jacobi)?;
    policy.validate()?;
    Ok(run_path(start, jacobi, stop, policy, seed, stream, None))
}

/// As [`simulate_path`], also returning the full trajectory.
pub fn simulate_path_traced(
    start: (f64, f64),
    jacobi: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    seed: u64,
    stream: u64,
) -> Result<(PathRecord, Vec<TraceRow>)> {
    stop.validate(start.0, jacobi)?;
    policy.validate()?;
    let mut trace = Vec::new();
    let rec = run_path(start, jacobi, stop, policy, seed, stream, Some(&mut trace));
    Ok((rec, trace))
}

fn trace_row(s: &PathState) -> TraceRow {
    TraceRow {
        t: s.t,
        r: s.r,
        theta: s.theta,
        qv: s.qv_theta,
        bv: s.bv_theta,
    }
}

/// Path loop without validation; callers validate once per ensemble.
pub(crate) fn run_path(
    start: (f64, f64),
    jacobi: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    seed: u64,
    stream: u64,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> PathRecord {
    let mut rng = path_rng(seed, stream);
    let mut s = PathState::start(start.0, start.1);
    let mut probe = None;
    let mut steps = 0u64;
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(trace_row(&s));
    }
    let (reason, cap) = loop {
        if steps >= stop.max_steps {
            break (StopReason::TimeCap, true);
        }
        let l = jacobi.local(s.r, s.theta);
        let (b_r, b_theta, inv_j2) = drifts(&l);
        let chart = s.r < POLE_CHART_RADIUS;
        let mut dt = if chart {
            let h = policy.dt_max.min((policy.delta_r * POLE_CHART_RADIUS).powi(2));
            if h.is_finite() {
                h
            } else {
                (0.05 * POLE_CHART_RADIUS).powi(2)
            }
        } else {
            policy.dt(s.r, b_r, b_theta)
        };
        dt = dt.min(stop.t_max - s.t);
        if stop.qv_max.is_finite() {
            dt = dt.min((stop.qv_max - s.qv_theta) / inv_j2);
        }
        let z_r: f64 = rng.sample(StandardNormal);
        let z_t: f64 = rng.sample(StandardNormal);
        let sq = dt.sqrt();
        let dw = (sq * z_r, sq * z_t);
        let out = if chart { advance_chart(&s, &l, dt, dw) } else { advance(&s, &l, dt, dw) };
        steps += 1;
        let prev = s;
        s = *out.state();
        if let Some(tr) = trace.as_deref_mut() {
            tr.push(trace_row(&s));
        }
        if let StepOutcome::Floored(_) = out {
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
        if let (Some(p), None) = (stop.r_probe, &probe) {
            if bridge_crossed(p - prev.r, p - s.r, dt, &mut rng) {
                let mut snap = s;
                snap.stream_pos = word_pos(&rng);
                probe = Some(snap);
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
    PathRecord {
        stop_reason: reason,
        final_state: s,
        probe,
        steps,
        stream_id: stream,
        step_cap_hit: cap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{solve_jacobi, CurvatureProfile, Envelope};

    fn hyperbolic(r_max: f64) -> JacobiField {
        solve_jacobi(&CurvatureProfile::constant(-1.0, r_max).unwrap()).unwrap()
    }

    #[test]
    fn radial_drift_is_half_coth() {
        let jf = hyperbolic(20.0);
        let (b_r, b_t, _) = drifts(&jf.local(3.0, 0.4));
        assert!((b_r - 0.5 / 3.0f64.tanh()).abs() < 1e-9);
        assert_eq!(b_t, 0.0);
    }

    #[test]
    fn radial_step_leaves_bv_untouched() {
        let jf = hyperbolic(20.0);
        let s = PathState::start(3.0, 1.0);
        let n = *step(&s, &jf, 0.01, (0.3, -1.2)).state();
        assert_eq!(n.bv_theta, 0.0);
        assert!((n.qv_theta - 0.01 / 3.0f64.sinh().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn zero_noise_step_is_pure_drift() {
        let base = CurvatureProfile::constant(-1.0, 20.0).unwrap();
        let p = CurvatureProfile::perturbed(base, 0.5, 3, Envelope::One).unwrap();
        let jf = solve_jacobi(&p).unwrap();
        let s = PathState::start(2.0, 0.3);
        let l = jf.local(2.0, 0.3);
        let dt = 1e-3;
        let n = *step(&s, &jf, dt, (0.0, 0.0)).state();
        let expect = -0.5 * l.dj_dtheta / l.j.powi(3) * dt;
        assert_eq!(n.bv_theta, expect);
        assert!((n.theta - s.theta - expect).abs() <= 4.0 * f64::EPSILON * s.theta.abs());
        assert!(l.dj_dtheta != 0.0);
    }

    #[test]
    fn pole_chart_passes_the_pole() {
        let jf = hyperbolic(10.0);
        let stop = StopSpec::to_radius(0.5);
        let mut angles = Vec::new();
        for i in 0..400 {
            let rec = simulate_path((2e-3, 0.0), &jf, &stop, &StepPolicy::default(), 5, i).unwrap();
            assert_eq!(rec.stop_reason, StopReason::ReachedInfinityProxy);
            angles.push(rec.final_state.angle());
        }
        // started this close to the pole the exit angle is nearly uniform
        let ks = crate::stats::ks_statistic(&angles, |t| t / std::f64::consts::TAU);
        assert!(ks < crate::stats::ks_critical_95(400) * 1.5, "ks = {ks}");
    }

    #[test]
    fn floor_is_flagged() {
        let jf = hyperbolic(20.0);
        let s = PathState::start(1e-3, 0.0);
        assert!(matches!(step(&s, &jf, 1e-4, (-50.0, 0.0)), StepOutcome::Floored(_)));
    }

    #[test]
    fn policy_respects_every_bound() {
        let p = StepPolicy::default();
        assert_eq!(p.dt(100.0, 0.005, 0.0), 1e-2);
        assert!((p.dt(0.1, 5.0, 0.0) - 2.5e-5).abs() < 1e-18);
        assert!((p.dt(1.0, 0.5, 100.0) - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn paths_are_reproducible_and_stop_consistently() {
        let jf = hyperbolic(20.0);
        let mut stop = StopSpec::to_radius(6.0);
        stop.r_inner = Some(1.0);
        let a = simulate_path((2.0, 0.0), &jf, &stop, &StepPolicy::default(), 11, 5).unwrap();
        let b = simulate_path((2.0, 0.0), &jf, &stop, &StepPolicy::default(), 11, 5).unwrap();
        assert_eq!(a, b);
        match a.stop_reason {
            StopReason::ReachedInfinityProxy => assert!(a.final_state.r > 5.5),
            StopReason::HitInner => assert!(a.final_state.r < 1.5),
            other => panic!("unexpected stop {other:?}"),
        }
        assert_eq!(a.final_state.bv_theta, 0.0);
    }

    #[test]
    fn invalid_stop_names_key() {
        let jf = hyperbolic(20.0);
        let stop = StopSpec::to_radius(30.0);
        match simulate_path((2.0, 0.0), &jf, &stop, &StepPolicy::default(), 0, 0) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "stop.r_inf"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_cap_reports_time_cap() {
        let jf = hyperbolic(20.0);
        let mut stop = StopSpec::to_radius(15.0);
        stop.max_steps = 10;
        let rec = simulate_path((2.0, 0.0), &jf, &stop, &StepPolicy::default(), 0, 0).unwrap();
        assert_eq!(rec.stop_reason, StopReason::TimeCap);
        assert!(rec.step_cap_hit);
        assert_eq!(rec.steps, 10);
    }

    #[test]
    fn qv_cap_lands_on_cap() {
        let jf = hyperbolic(20.0);
        let mut stop = StopSpec::to_radius(15.0);
        stop.qv_max = 0.05;
        let rec = simulate_path((0.5, 0.0), &jf, &stop, &StepPolicy::default(), 3, 1).unwrap();
        if rec.stop_reason == StopReason::QvCap {
            assert!((rec.final_state.qv_theta - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn probe_snapshot_precedes_stop() {
        let jf = hyperbolic(20.0);
        let stop = StopSpec::to_radius(4.0).with_doubled_proxy();
        let rec = simulate_path((2.0, 0.0), &jf, &stop, &StepPolicy::default(), 1, 2).unwrap();
        if rec.stop_reason == StopReason::ReachedInfinityProxy {
            let p = rec.probe.expect("probe radius lies on the way out");
            assert!(p.t <= rec.final_state.t && p.r > 3.5);
        }
    }
}
