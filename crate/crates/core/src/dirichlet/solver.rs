//! Monte Carlo harmonic extension `u(x) = E^x[g(B_ξ)]`.
//!
//! `ξ` is replaced by the first passage of `r_inf`; every run simulates to
//! `2·r_inf` and snapshots the passage of `r_inf`, so each estimate carries the
//! change of its value under a doubled proxy.

use std::f64::consts::TAU;

use serde::Serialize;

use super::boundary::{wrap_angle, BoundaryFunction};
use crate::error::{Error, Result};
use crate::estimates::{classify_transience, Verdict};
use crate::geometry::JacobiField;
use crate::sde::{simulate_records, McConfig, PathRecord, StepPolicy, StopReason, StopSpec};
use crate::stats::{ks_critical_95, ks_statistic, MeanEstimate, Proportion};

/// Largest fraction of capped paths for which an estimate is reported valid.
pub const MAX_EXCLUDED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirichletSettings {
    /// Headline infinity proxy; paths run on to `2·r_inf`.
    pub r_inf: f64,
    pub t_max: f64,
    pub policy: StepPolicy,
    /// Threshold for the `sup|bv_θ|` exceedance statistic.
    pub bv_delta: f64,
}

impl DirichletSettings {
    /// No time cap: the surface is checked to be transient before any run.
    pub fn new(r_inf: f64) -> Self {
        DirichletSettings {
            r_inf,
            t_max: f64::INFINITY,
            policy: StepPolicy::default(),
            bv_delta: 0.05,
        }
    }

    fn stop(&self) -> StopSpec {
        let mut s = StopSpec::to_radius(self.r_inf).with_doubled_proxy();
        s.t_max = self.t_max;
        s
    }
}

/// Exit data of an ensemble, reusable for any boundary function.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitSample {
    pub x: (f64, f64),
    pub r_inf: f64,
    pub n_paths: usize,
    /// Exit angles at `r_inf` (index-aligned with `outer_angles` where both exist).
    pub angles: Vec<f64>,
    pub outer_angles: Vec<f64>,
    pub excluded: u64,
    pub outer_excluded: u64,
    pub floored: u64,
    pub supbv_exceed: Proportion,
}

fn check_transient(jacobi: &JacobiField) -> Result<()> {
    match classify_transience(jacobi.profile())? {
        Verdict::Transient => Ok(()),
        v => Err(Error::RepresentationInvalid(format!(
            "classify_transience returned {} for this profile; u(x) = E[g(B_ξ)] needs a transient surface",
            v.as_str()
        ))),
    }
}

/// Simulates exit angles from `x`.
pub fn sample_exits(x: (f64, f64), jacobi: &JacobiField, settings: &DirichletSettings, mc: &McConfig) -> Result<ExitSample> {
    check_transient(jacobi)?;
    let stop = settings.stop();
    mc.validate()?;
    stop.validate(x.0, jacobi)?;
    settings.policy.validate()?;
    let records = simulate_records(x, jacobi, &stop, &settings.policy, mc)?;
    Ok(collect(x, settings, &records))
}

fn collect(x: (f64, f64), settings: &DirichletSettings, records: &[PathRecord]) -> ExitSample {
    let mut s = ExitSample {
        x,
        r_inf: settings.r_inf,
        n_paths: records.len(),
        angles: Vec::new(),
        outer_angles: Vec::new(),
        excluded: 0,
        outer_excluded: 0,
        floored: 0,
        supbv_exceed: Proportion::new(0, 0),
    };
    let mut bv_hits = 0;
    for rec in records {
        if rec.stop_reason == StopReason::NumericalFloor {
            s.floored += 1;
            continue;
        }
        let (reason, state) = rec.truncated();
        match reason {
            StopReason::ReachedInfinityProxy => s.angles.push(state.angle()),
            _ => s.excluded += 1,
        }
        match rec.stop_reason {
            StopReason::ReachedInfinityProxy => s.outer_angles.push(rec.final_state.angle()),
            _ => s.outer_excluded += 1,
        }
        if state.sup_bv > settings.bv_delta {
            bv_hits += 1;
        }
    }
    s.supbv_exceed = Proportion::new(bv_hits, records.len() as u64 - s.floored);
    s
}

/// `u(x)` with 95% half-width and the proxy-doubling drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicEstimate {
    pub r0: f64,
    pub theta0: f64,
    pub value: f64,
    /// `1.96·s/√n`.
    pub ci: f64,
    pub n: u64,
    pub r_inf: f64,
    /// Value at `2·r_inf` minus value at `r_inf`.
    pub truncation_drift: f64,
    /// Paths stopped by a cap before `r_inf` (not averaged).
    pub excluded: u64,
    pub floored: u64,
    /// Excluded paths stayed below 1% of the ensemble.
    pub valid: bool,
    /// `|truncation_drift| > 2·ci`.
    pub unreliable: bool,
}

impl ExitSample {
    pub fn estimate(&self, g: &BoundaryFunction) -> HarmonicEstimate {
        let vals: Vec<f64> = self.angles.iter().map(|&t| g.eval(t)).collect();
        let outer: Vec<f64> = self.outer_angles.iter().map(|&t| g.eval(t)).collect();
        let m = MeanEstimate::from_samples(&vals);
        let mo = MeanEstimate::from_samples(&outer);
        let drift = mo.mean - m.mean;
        let total = (self.n_paths as u64 - self.floored).max(1) as f64;
        HarmonicEstimate {
            r0: self.x.0,
            theta0: self.x.1,
            value: m.mean,
            ci: m.ci,
            n: m.n,
            r_inf: self.r_inf,
            truncation_drift: drift,
            excluded: self.excluded,
            floored: self.floored,
            valid: (self.excluded as f64) < MAX_EXCLUDED_FRACTION * total && m.n > 0,
            unreliable: drift.abs() > 2.0 * m.ci,
        }
    }

    /// Fraction of exit angles within `width` of `center` (circular distance).
    pub fn mass_within(&self, center: f64, width: f64) -> Proportion {
        let k = self.angles.iter().filter(|&&t| wrap_angle(t - center).abs() <= width).count();
        Proportion::new(k as u64, self.angles.len() as u64)
    }
}

/// Monte Carlo solution of the Dirichlet problem at infinity at `x`.
pub fn solve_dirichlet(
    x: (f64, f64),
    g: &BoundaryFunction,
    jacobi: &JacobiField,
    settings: &DirichletSettings,
    mc: &McConfig,
) -> Result<HarmonicEstimate> {
    Ok(sample_exits(x, jacobi, settings, mc)?.estimate(g))
}

/// Normalized exit-angle histogram with a KS comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitHistogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub n: usize,
    /// KS distance at `r_inf` against the oracle CDF.
    pub ks: f64,
    /// Same at `2·r_inf`.
    pub ks_outer: f64,
    pub ks_critical: f64,
}

/// Histogram over `[0, 2π)` with `bins` bins; KS against `oracle_cdf` (uniform if `None`).
pub fn exit_angle_histogram(
    sample: &ExitSample,
    bins: usize,
    oracle_cdf: Option<&dyn Fn(f64) -> f64>,
) -> Result<ExitHistogram> {
    if bins == 0 {
        return Err(Error::config("bins", "need at least one bin"));
    }
    if sample.angles.is_empty() {
        return Err(Error::numerical("dirichlet", "exit_angle_histogram", "no path reached r_inf"));
    }
    let w = TAU / bins as f64;
    let mut counts = vec![0u64; bins];
    for &t in &sample.angles {
        counts[((t / w) as usize).min(bins - 1)] += 1;
    }
    let n = sample.angles.len();
    let uniform = |t: f64| t / TAU;
    let cdf: &dyn Fn(f64) -> f64 = oracle_cdf.unwrap_or(&uniform);
    Ok(ExitHistogram {
        edges: (0..=bins).map(|i| i as f64 * w).collect(),
        density: counts.iter().map(|&c| c as f64 / (n as f64 * w)).collect(),
        n,
        ks: ks_statistic(&sample.angles, cdf),
        ks_outer: ks_statistic(&sample.outer_angles, cdf),
        ks_critical: ks_critical_95(n),
    })
}

/// One row of a boundary-continuity scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub r: f64,
    pub estimate: HarmonicEstimate,
    /// `P(sup|bv_θ| > bv_delta)` at `r_inf`.
    pub supbv_exceed: Proportion,
}

/// `u(r, θ̂)` along a ray, with `r_inf = r_inf_factor·r` at each radius.
pub fn boundary_continuity_scan(
    theta_hat: f64,
    g: &BoundaryFunction,
    jacobi: &JacobiField,
    radii: &[f64],
    r_inf_factor: f64,
    settings: &DirichletSettings,
    mc: &McConfig,
) -> Result<Vec<ScanRow>> {
    if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.is_empty() {
        return Err(Error::config("radii", "radii must be a non-empty increasing list"));
    }
    if !(r_inf_factor > 1.0) {
        return Err(Error::config("r_inf_factor", "must exceed 1"));
    }
    check_transient(jacobi)?;
    radii
        .iter()
        .map(|&r| {
            let s = DirichletSettings {
                r_inf: r_inf_factor * r,
                ..*settings
            };
            let stop = s.stop();
            stop.validate(r, jacobi)?;
            let records = simulate_records((r, theta_hat), jacobi, &stop, &s.policy, mc)?;
            let sample = collect((r, theta_hat), &s, &records);
            Ok(ScanRow {
                r,
                estimate: sample.estimate(g),
                supbv_exceed: sample.supbv_exceed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::poisson_cdf_h2;
    use crate::geometry::{solve_jacobi, CurvatureProfile};

    fn h2() -> JacobiField {
        solve_jacobi(&CurvatureProfile::constant(-1.0, 20.0).unwrap()).unwrap()
    }

    #[test]
    fn constant_data_is_exact() {
        let e = solve_dirichlet((1.0, 0.0), &BoundaryFunction::Constant(1.0), &h2(), &DirichletSettings::new(6.0), &McConfig::new(200, 1)).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.ci, 0.0);
        assert!(e.valid && !e.unreliable);
    }

    #[test]
    fn recurrent_surface_is_rejected() {
        let flat = solve_jacobi(&CurvatureProfile::constant(0.0, 100.0).unwrap()).unwrap();
        let r = solve_dirichlet((1.0, 0.0), &BoundaryFunction::cos(1), &flat, &DirichletSettings::new(6.0), &McConfig::new(10, 1));
        assert!(matches!(r, Err(Error::RepresentationInvalid(_))));
    }

    #[test]
    fn estimator_is_linear_and_bounded() {
        let s = sample_exits((1.5, 0.0), &h2(), &DirichletSettings::new(6.0), &McConfig::new(300, 2)).unwrap();
        let g1 = BoundaryFunction::cos(1);
        let g2 = BoundaryFunction::bump(0.5);
        let sum = BoundaryFunction::Sum(vec![(2.0, g1.clone()), (-0.5, g2.clone())]);
        let lhs = s.estimate(&sum).value;
        let rhs = 2.0 * s.estimate(&g1).value - 0.5 * s.estimate(&g2).value;
        assert!((lhs - rhs).abs() < 1e-12);
        let v = s.estimate(&g2).value;
        assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn cos_data_matches_poisson_extension() {
        let s = sample_exits((1.5, 0.0), &h2(), &DirichletSettings::new(8.0), &McConfig::new(2000, 3)).unwrap();
        let e = s.estimate(&BoundaryFunction::cos(1));
        assert!((e.value - 0.75f64.tanh()).abs() < 1.5 * e.ci + 0.01, "{e:?}");
        let h = exit_angle_histogram(&s, 16, Some(&|t| poisson_cdf_h2(1.5, 0.0, t))).unwrap();
        assert!(h.ks < 2.0 * h.ks_critical, "{h:?}");
        let total: f64 = h.density.iter().map(|d| d * TAU / 16.0).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
