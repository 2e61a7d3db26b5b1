//! Experiment runners behind the command-line tool.
//!
//! Each runner turns an [`ExperimentConfig`] into a set of files (a TOML report
//! plus CSV tables and optional SVG plots) written through an [`OutputSet`], and
//! a short human-readable summary.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::dirichlet::{
    boundary_continuity_scan, exit_angle_histogram, poisson_cdf_h2, poisson_kernel_h2, sample_exits, BoundaryFunction,
};
use crate::error::{Error, Result};
use crate::estimates::{
    build_scale, classify_transience, expected_angular_qv, green_energy_annulus, hitting_probability,
    hitting_probability_between, sector_energy, InnerBoundary, Verdict, DEFAULT_R_LO,
};
use crate::geometry::{comparison_profile, jacobi_lower_bound, solve_jacobi, CurvatureProfile, ProfileKind};
use crate::output::{Csv, OutputSet};
use crate::quadrature::{integrate, QuadOpts};
use crate::sde::{
    coupling_refinement, run_coupled_ensemble, run_ensemble, McConfig, PathRecord, StepPolicy, StopReason, StopSpec,
};
use crate::stats::Proportion;
use crate::validate::oracle_suite;

/// Flags that change what is written but not what is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub plot: bool,
    pub paths: bool,
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    kind: &'static str,
    version: &'static str,
    config_hash: String,
    seed: u64,
    results: &'a T,
}

fn write_report<T: Serialize>(out: &mut OutputSet, cfg: &ExperimentConfig, results: &T) -> Result<()> {
    let report = Report {
        kind: cfg.kind.as_str(),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.config_hash(),
        seed: cfg.mc.seed,
        results,
    };
    let value = toml::Value::try_from(&report)
        .map_err(|e| Error::numerical("cli", "report", format!("report not representable as TOML: {e}")))?;
    out.write("report.toml", &toml::to_string(&value).expect("TOML values serialize"))?;
    // canonical form: the worker count must not change any output byte
    out.write("config.toml", &cfg.canonical())
}

/// Runs the experiment named by `cfg.kind`, writing partial files into `out`.
/// Returns the summary lines. The caller commits `out` on success.
pub fn run(cfg: &ExperimentConfig, opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    match cfg.kind {
        ExperimentKind::Simulate => simulate(cfg, opts, out),
        ExperimentKind::Coupled => coupled(cfg, opts, out),
        ExperimentKind::Dirichlet => dirichlet(cfg, opts, out),
        ExperimentKind::Dichotomy => dichotomy(cfg, opts, out),
        ExperimentKind::Estimates => estimates(cfg, opts, out),
        ExperimentKind::Validate => validate(cfg, out),
    }
}

/// Smallest cutoff past which a profile is known to sit under the curvature ceiling.
pub fn certified_cutoff(profile: &CurvatureProfile, default: f64) -> f64 {
    match &profile.kind {
        ProfileKind::Threshold { cutoff, width, .. } => cutoff + width,
        ProfileKind::Perturbed { base, .. } | ProfileKind::Modulated { base, .. } => certified_cutoff(base, default),
        _ => default,
    }
}

fn fmt_p(p: &Proportion) -> String {
    format!("{:.4} [{:.4}, {:.4}]", p.p, p.lo, p.hi)
}

fn write_paths(out: &mut OutputSet, name: &str, records: &[PathRecord]) -> Result<()> {
    let mut csv = Csv::new(&["stream_id", "stop_reason", "t", "r", "theta", "qv", "bv", "sup_dev", "steps"]);
    for rec in records {
        let s = &rec.final_state;
        csv.row(&[&rec.stream_id, &rec.stop_reason.as_str(), &s.t, &s.r, &s.theta, &s.qv_theta, &s.bv_theta, &s.sup_dev, &rec.steps]);
    }
    out.write(name, csv.as_str())
}

// ---------------------------------------------------------------- simulate

#[derive(Serialize)]
struct SimulateRow {
    r0: f64,
    theta0: f64,
    r_inf: f64,
    r_probe: Option<f64>,
    stop_counts: std::collections::BTreeMap<String, u64>,
    qv_mean: f64,
    qv_ci: f64,
    p_qv_exceed: Vec<f64>,
    p_supdev_exceed: Vec<f64>,
    p_supbv_exceed: Vec<f64>,
    /// Outer minus headline `P(⟨θ⟩ > δ)`.
    truncation_drift: Vec<f64>,
}

fn simulate(cfg: &ExperimentConfig, opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    let jac = solve_jacobi(&cfg.profile.build()?)?;
    let policy = cfg.policy.build();
    let mc = cfg.mc.build();
    let mut rows = Vec::new();
    let mut summary = Csv::new(&[
        "r0", "theta0", "n_paths", "reached", "hit_inner", "exited_sector", "time_cap", "qv_cap", "floored", "qv_mean", "qv_ci",
    ]);
    let mut exceed = Csv::new(&["r0", "theta0", "view", "delta", "p_qv", "p_qv_lo", "p_qv_hi", "p_supdev", "p_supbv"]);
    let mut lines = Vec::new();
    for (i, &[r0, th0]) in cfg.start.points.iter().enumerate() {
        let stop = cfg.stop.build(th0);
        let rep = run_ensemble((r0, th0), &jac, &stop, &policy, &mc)?;
        let h = rep.headline();
        let c = |r| h.count(r);
        summary.row(&[
            &r0,
            &th0,
            &rep.n_paths,
            &c(StopReason::ReachedInfinityProxy),
            &c(StopReason::HitInner),
            &c(StopReason::ExitedSector),
            &c(StopReason::TimeCap),
            &c(StopReason::QvCap),
            &c(StopReason::NumericalFloor),
            &h.qv_mean.mean,
            &h.qv_mean.ci,
        ]);
        let mut views = vec![("outer", &rep.outer)];
        if let Some(inner) = &rep.inner {
            views.insert(0, ("probe", inner));
        }
        for (view, s) in views {
            for k in 0..s.p_qv_exceed.len() {
                let q = &s.p_qv_exceed[k].prob;
                exceed.row(&[
                    &r0,
                    &th0,
                    &view,
                    &s.p_qv_exceed[k].delta,
                    &q.p,
                    &q.lo,
                    &q.hi,
                    &s.p_supdev_exceed[k].prob.p,
                    &s.p_supbv_exceed[k].prob.p,
                ]);
            }
        }
        if opts.paths {
            write_paths(out, &format!("paths_{i}.csv"), &rep.records)?;
        }
        let first = h.p_qv_exceed.first();
        lines.push(format!(
            "simulate r0={r0} theta0={th0}: reached {}/{}, E<theta>={:.4e}{}",
            c(StopReason::ReachedInfinityProxy),
            rep.n_paths,
            h.qv_mean.mean,
            first.map(|e| format!(", P(<theta> > {}) = {}", e.delta, fmt_p(&e.prob))).unwrap_or_default()
        ));
        rows.push(SimulateRow {
            r0,
            theta0: th0,
            r_inf: h.r_inf,
            r_probe: stop.r_probe,
            stop_counts: h.stop_counts.iter().map(|(k, v)| (k.as_str().to_string(), *v)).collect(),
            qv_mean: h.qv_mean.mean,
            qv_ci: h.qv_mean.ci,
            p_qv_exceed: h.p_qv_exceed.iter().map(|e| e.prob.p).collect(),
            p_supdev_exceed: h.p_supdev_exceed.iter().map(|e| e.prob.p).collect(),
            p_supbv_exceed: h.p_supbv_exceed.iter().map(|e| e.prob.p).collect(),
            truncation_drift: rep.qv_truncation_drift(),
        });
    }
    out.write("simulate.csv", summary.as_str())?;
    out.write("exceedance.csv", exceed.as_str())?;
    if opts.plot && !rows.is_empty() && !mc.deltas.is_empty() {
        // P(<theta> > δ₀) against r0; whiskers are the Wilson interval
        let pts: Vec<(f64, f64, f64, f64)> = cfg
            .start
            .points
            .iter()
            .zip(&rows)
            .map(|(p, row)| {
                let p0 = row.p_qv_exceed[0];
                let n = mc.n_paths as u64;
                let ci = Proportion::new((p0 * n as f64).round() as u64, n);
                (p[0], p0, ci.lo, ci.hi)
            })
            .collect();
        let title = format!("P(<theta> > {})", mc.deltas[0]);
        out.write("qv_exceed.svg", &crate::svg::trend(&pts, true, &title, "r0", "probability"))?;
    }
    #[derive(Serialize)]
    struct R<'a> {
        deltas: &'a [f64],
        n_paths: usize,
        points: Vec<SimulateRow>,
    }
    write_report(out, cfg, &R { deltas: &mc.deltas, n_paths: mc.n_paths, points: rows })?;
    Ok(lines)
}

// ---------------------------------------------------------------- coupled

#[derive(Serialize)]
struct CoupledRow {
    r0: f64,
    theta0: f64,
    min_gap: f64,
    tol_step: f64,
    gap_violations: u64,
    qv_violations: u64,
    floored: u64,
}

fn coupled(cfg: &ExperimentConfig, opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    let profile = cfg.profile.build()?;
    let tilde = comparison_profile(&profile, cfg.coupled.eps, cfg.coupled.cutoff)?;
    let jac = solve_jacobi(&profile)?;
    let jac_t = solve_jacobi(&tilde)?;
    let policy = cfg.policy.build();
    let mc = cfg.mc.build();
    let mut csv = Csv::new(&["r0", "theta0", "n_paths", "min_gap", "tol_step", "gap_violations", "qv_violations", "floored"]);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (i, &[r0, th0]) in cfg.start.points.iter().enumerate() {
        let stop = cfg.stop.build(th0);
        let rep = run_coupled_ensemble((r0, th0), &jac, &jac_t, &stop, &policy, cfg.coupled.k_tol, &mc)?;
        csv.row(&[&r0, &th0, &rep.n_paths, &rep.min_gap, &rep.tol_step, &rep.gap_violations, &rep.qv_violations, &rep.floored]);
        if opts.paths {
            let mut p = Csv::new(&["stream_id", "stop_reason", "t", "r", "r_tilde", "qv", "qv_tilde", "min_gap"]);
            for c in &rep.records {
                let (s, st) = (&c.path.final_state, &c.tilde.final_state);
                p.row(&[&c.path.stream_id, &c.path.stop_reason.as_str(), &s.t, &s.r, &st.r, &s.qv_theta, &st.qv_theta, &c.min_gap]);
            }
            out.write(&format!("coupled_paths_{i}.csv"), p.as_str())?;
        }
        lines.push(format!(
            "coupled r0={r0}: min gap {:.3e} (tol {:.3e}), gap violations {}, qv violations {}",
            rep.min_gap, rep.tol_step, rep.gap_violations, rep.qv_violations
        ));
        rows.push(CoupledRow {
            r0,
            theta0: th0,
            min_gap: rep.min_gap,
            tol_step: rep.tol_step,
            gap_violations: rep.gap_violations,
            qv_violations: rep.qv_violations,
            floored: rep.floored,
        });
    }
    out.write("coupled.csv", csv.as_str())?;

    let refinement = if cfg.coupled.refine_dt > 0.0 {
        let [r0, th0] = cfg.start.points[0];
        let mut stop = StopSpec::to_radius(cfg.stop.r_inf);
        // keep fixed-step paths away from the pole, where 1/J makes the angular step O(1)
        stop.r_inner = Some(cfg.stop.r_inner.unwrap_or(0.0).max(r0 / 2.0));
        stop.t_max = cfg.coupled.refine_t_max;
        let rmc = McConfig {
            n_paths: cfg.coupled.refine_paths,
            ..mc.clone()
        };
        let rr = coupling_refinement((r0, th0), &jac, &jac_t, &stop, cfg.coupled.refine_dt, 3, 16, &rmc)?;
        let mut t = Csv::new(&["dt", "error", "ratio"]);
        for (k, (dt, e)) in rr.dts.iter().zip(&rr.errors).enumerate() {
            let ratio = rr.ratios.get(k).copied().unwrap_or(f64::NAN);
            t.row(&[dt, e, &ratio]);
        }
        out.write("refinement.csv", t.as_str())?;
        if opts.plot {
            let pts: Vec<_> = rr.dts.iter().zip(&rr.errors).map(|(&d, &e)| (d, e, e, e)).collect();
            out.write("refinement.svg", &crate::svg::trend(&pts, true, "coupling gap error", "dt", "mean sup error"))?;
        }
        lines.push(format!(
            "refinement: errors {:?}, ratios {:?}",
            rr.errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
            rr.ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ));
        Some(rr)
    } else {
        None
    };
    #[derive(Serialize)]
    struct R {
        eps: f64,
        cutoff: f64,
        points: Vec<CoupledRow>,
        refinement: Option<crate::sde::RefinementReport>,
    }
    write_report(
        out,
        cfg,
        &R {
            eps: cfg.coupled.eps,
            cutoff: cfg.coupled.cutoff,
            points: rows,
            refinement,
        },
    )?;
    Ok(lines)
}

// ---------------------------------------------------------------- dirichlet

/// `(ρ-scaled radius, curvature scale)` for which the hyperbolic Poisson kernel applies.
fn hyperbolic_scale(profile: &CurvatureProfile) -> Option<f64> {
    match profile.kind {
        ProfileKind::Constant { kappa } if kappa < 0.0 => Some((-kappa).sqrt()),
        _ => None,
    }
}

/// `∫ g P(x, ·) dθ` on a constant-curvature plane.
pub fn harmonic_oracle(g: &BoundaryFunction, scale: f64, r0: f64, theta0: f64) -> Result<f64> {
    Ok(integrate(|t| g.eval(t) * poisson_kernel_h2(scale * r0, theta0, t), 0.0, TAU, QuadOpts::with_tol(1e-12, 1e-10))?.value)
}

#[derive(Serialize)]
struct DirichletRow {
    r0: f64,
    theta0: f64,
    estimate: crate::dirichlet::HarmonicEstimate,
    oracle: Option<f64>,
    ks: f64,
    ks_outer: f64,
    ks_critical: f64,
}

fn dirichlet(cfg: &ExperimentConfig, opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    let profile = cfg.profile.build()?;
    let jac = solve_jacobi(&profile)?;
    let g = cfg.dirichlet.boundary_function()?;
    let settings = cfg.dirichlet.settings(&cfg.stop, cfg.policy.build());
    let mc = cfg.mc.build();
    let scale = hyperbolic_scale(&profile);
    let mut csv = Csv::new(&[
        "r0", "theta0", "u", "ci", "n", "oracle", "truncation_drift", "excluded", "floored", "ks", "ks_critical", "unreliable",
    ]);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for (i, &[r0, th0]) in cfg.start.points.iter().enumerate() {
        let sample = sample_exits((r0, th0), &jac, &settings, &mc)?;
        let est = sample.estimate(&g);
        let oracle = scale.map(|s| harmonic_oracle(&g, s, r0, th0)).transpose()?;
        let cdf = scale.map(|s| move |t: f64| poisson_cdf_h2(s * r0, th0, t));
        let hist = exit_angle_histogram(&sample, cfg.dirichlet.bins, cdf.as_ref().map(|f| f as &dyn Fn(f64) -> f64))?;
        let mut h = Csv::new(&["left", "right", "density"]);
        for k in 0..hist.density.len() {
            h.row(&[&hist.edges[k], &hist.edges[k + 1], &hist.density[k]]);
        }
        out.write(&format!("histogram_{i}.csv"), h.as_str())?;
        if opts.plot {
            let overlay: Option<Vec<(f64, f64)>> =
                scale.map(|s| (0..=200).map(|k| k as f64 * TAU / 200.0).map(|t| (t, poisson_kernel_h2(s * r0, th0, t))).collect());
            let svg = crate::svg::histogram(&hist.edges, &hist.density, overlay.as_deref(), &format!("exit angles from r0 = {r0}"));
            out.write(&format!("histogram_{i}.svg"), &svg)?;
        }
        let o = oracle.unwrap_or(f64::NAN);
        csv.row(&[
            &r0, &th0, &est.value, &est.ci, &est.n, &o, &est.truncation_drift, &est.excluded, &est.floored, &hist.ks, &hist.ks_critical,
            &est.unreliable,
        ]);
        lines.push(format!(
            "dirichlet r0={r0} theta0={th0}: u = {:.4} ± {:.4}{}{}",
            est.value,
            est.ci,
            oracle.map(|o| format!(" (oracle {o:.4})")).unwrap_or_default(),
            if est.unreliable { " [unreliable]" } else { "" }
        ));
        rows.push(DirichletRow {
            r0,
            theta0: th0,
            estimate: est,
            oracle,
            ks: hist.ks,
            ks_outer: hist.ks_outer,
            ks_critical: hist.ks_critical,
        });
    }
    out.write("dirichlet.csv", csv.as_str())?;

    let mut scan_rows = Vec::new();
    if let Some(radii) = &cfg.dirichlet.radii {
        let scan = boundary_continuity_scan(cfg.dirichlet.theta_hat, &g, &jac, radii, cfg.dirichlet.r_inf_factor, &settings, &mc)?;
        let mut s = Csv::new(&["r", "u", "ci", "target", "abs_error", "p_supbv"]);
        let target = g.eval(cfg.dirichlet.theta_hat);
        for row in &scan {
            let e = &row.estimate;
            s.row(&[&row.r, &e.value, &e.ci, &target, &(e.value - target).abs(), &row.supbv_exceed.p]);
        }
        out.write("scan.csv", s.as_str())?;
        if opts.plot {
            let pts: Vec<_> = scan
                .iter()
                .map(|r| {
                    let d = (r.estimate.value - target).abs();
                    (r.r, d, (d - r.estimate.ci).max(0.0), d + r.estimate.ci)
                })
                .collect();
            out.write("scan.svg", &crate::svg::trend(&pts, true, "|u(r, theta) - g(theta)|", "r", "error"))?;
        }
        if let Some(last) = scan.last() {
            lines.push(format!(
                "scan theta={}: |u - g| = {:.4} at r = {}",
                cfg.dirichlet.theta_hat,
                (last.estimate.value - target).abs(),
                last.r
            ));
        }
        scan_rows = scan;
    }
    #[derive(Serialize)]
    struct R<'a> {
        boundary: String,
        r_inf: f64,
        points: Vec<DirichletRow>,
        scan: &'a [crate::dirichlet::ScanRow],
    }
    write_report(
        out,
        cfg,
        &R {
            boundary: g.to_config_string(),
            r_inf: settings.r_inf,
            points: rows,
            scan: &scan_rows,
        },
    )?;
    Ok(lines)
}

// ---------------------------------------------------------------- dichotomy

/// Outcome of one dichotomy run for a single threshold constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DichotomyRow {
    pub c: f64,
    pub verdict: Verdict,
    /// `P(hit α)` with the outer radius at infinity (NaN when inconclusive).
    pub hit_prob: f64,
    /// Same with the outer barrier at `r_out` (what the simulation sees).
    pub hit_prob_between: f64,
    pub r_out: f64,
    pub mc_hit: Proportion,
    pub mc_hit_half: Proportion,
    pub mc_undecided: u64,
}

/// Threshold profile used by the dichotomy runner for constant `c`.
pub fn dichotomy_profile(cfg: &ExperimentConfig, c: f64) -> Result<CurvatureProfile> {
    let cutoff = cfg.profile.cutoff.unwrap_or(std::f64::consts::E);
    CurvatureProfile::threshold(c, cutoff, cfg.profile.w.unwrap_or(cutoff), cfg.profile.r_max)
        .map_err(|e| Error::config("dichotomy.cs", e.to_string()))
}

/// Classifier, oracle and Monte Carlo hitting frequency for one `c`.
pub fn dichotomy_row(cfg: &ExperimentConfig, c: f64) -> Result<DichotomyRow> {
    let d = &cfg.dichotomy;
    let profile = dichotomy_profile(cfg, c)?;
    let verdict = classify_transience(&profile)?;
    let jac = solve_jacobi(&profile)?;
    let scale = build_scale(&jac)?;
    let r_out = match verdict {
        Verdict::Transient => d.r_out.min(profile.r_max),
        _ => profile.r_max,
    };
    let hit_prob = hitting_probability(&scale, d.r0, d.alpha).unwrap_or(f64::NAN);
    let hit_prob_between = hitting_probability_between(&scale, d.r0, d.alpha, r_out)?;
    let mut stop = StopSpec::to_radius(r_out);
    stop.r_inner = Some(d.alpha);
    stop.t_max = d.t_max;
    let mc = cfg.mc.build();
    let rep = run_ensemble((d.r0, 0.0), &jac, &stop, &cfg.policy.build(), &mc)?;
    let live: Vec<&PathRecord> = rep.records.iter().filter(|r| r.stop_reason != StopReason::NumericalFloor).collect();
    let n = live.len() as u64;
    let hit = |t: f64| live.iter().filter(|r| r.stop_reason == StopReason::HitInner && r.final_state.t <= t).count() as u64;
    let undecided = live.iter().filter(|r| r.stop_reason.is_cap()).count() as u64;
    Ok(DichotomyRow {
        c,
        verdict,
        hit_prob,
        hit_prob_between,
        r_out,
        mc_hit: Proportion::new(hit(f64::INFINITY), n),
        mc_hit_half: Proportion::new(hit(d.t_max / 2.0), n),
        mc_undecided: undecided,
    })
}

fn dichotomy(cfg: &ExperimentConfig, _opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    let mut csv = Csv::new(&[
        "c", "verdict", "hit_prob", "hit_prob_between", "r_out", "mc_hit_freq", "mc_lo", "mc_hi", "mc_hit_freq_half", "undecided",
    ]);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    for &c in &cfg.dichotomy.cs {
        let row = dichotomy_row(cfg, c)?;
        csv.row(&[
            &c,
            &row.verdict.as_str(),
            &row.hit_prob,
            &row.hit_prob_between,
            &row.r_out,
            &row.mc_hit.p,
            &row.mc_hit.lo,
            &row.mc_hit.hi,
            &row.mc_hit_half.p,
            &row.mc_undecided,
        ]);
        lines.push(format!(
            "dichotomy c={c}: {} (P(hit) = {:.4}, two-barrier {:.4}), MC {} at t_max, {:.4} at t_max/2",
            row.verdict.as_str(),
            row.hit_prob,
            row.hit_prob_between,
            fmt_p(&row.mc_hit),
            row.mc_hit_half.p
        ));
        rows.push(row);
    }
    out.write("dichotomy.csv", csv.as_str())?;
    #[derive(Serialize)]
    struct R {
        r0: f64,
        alpha: f64,
        t_max: f64,
        rows: Vec<DichotomyRow>,
    }
    let d = &cfg.dichotomy;
    write_report(out, cfg, &R { r0: d.r0, alpha: d.alpha, t_max: d.t_max, rows })?;
    Ok(lines)
}

// ---------------------------------------------------------------- estimates

fn estimates(cfg: &ExperimentConfig, opts: RunOptions, out: &mut OutputSet) -> Result<Vec<String>> {
    let e = &cfg.estimates;
    let profile = cfg.profile.build()?;
    let jac = solve_jacobi(&profile)?;
    let mut lines = Vec::new();
    let mut skipped = Vec::new();

    let mut classify = Csv::new(&["c", "verdict"]);
    let mut verdicts = Vec::new();
    for &c in &e.classify_cs {
        let v = classify_transience(&dichotomy_profile(cfg, c)?)?;
        classify.row(&[&c, &v.as_str()]);
        verdicts.push((c, v));
    }
    out.write("classify.csv", classify.as_str())?;
    lines.push(format!(
        "classify: {}",
        verdicts.iter().map(|(c, v)| format!("c={c} {}", v.as_str())).collect::<Vec<_>>().join(", ")
    ));

    let mut jcsv = Vec::new();
    jac.write_csv(&mut jcsv, 0.0)?;
    out.write("jacobi.csv", &String::from_utf8_lossy(&jcsv))?;
    if profile.is_radial() {
        let scale = build_scale(&jac)?;
        let mut s = Vec::new();
        scale.write_csv(&mut s)?;
        out.write("scale.csv", &String::from_utf8_lossy(&s))?;
        lines.push(format!("scale: verdict {}", scale.verdict().as_str()));
    }

    let cutoff = certified_cutoff(&profile, std::f64::consts::E);
    let lb = jacobi_lower_bound(e.eps, cutoff)?;
    lines.push(format!("lower bound: A = {:.4}, C = {:.4}", lb.a, lb.c));
    let mut energy = Csv::new(&["alpha", "beta", "energy", "quadrature_error", "tail_bound", "upper", "bound"]);
    let mut energies = Vec::new();
    for &alpha in &e.alphas {
        if !(alpha >= lb.a && alpha < jac.r_max()) {
            skipped.push(format!("sector energy alpha = {alpha} outside [A, r_max) = [{}, {})", lb.a, jac.r_max()));
            continue;
        }
        for &beta in &e.betas {
            let s = sector_energy(&jac, alpha, beta, 0.0, Some(&lb))?;
            energy.row(&[&alpha, &beta, &s.quadrature, &s.quadrature_error, &s.tail_bound, &s.upper, &s.lemma_bound]);
            energies.push(s);
        }
    }
    out.write("sector_energy.csv", energy.as_str())?;
    if opts.plot && !energies.is_empty() {
        let beta = energies[0].beta;
        let pts: Vec<_> = energies.iter().filter(|s| s.beta == beta).map(|s| (s.alpha, s.upper, s.quadrature, s.lemma_bound)).collect();
        out.write("sector_energy.svg", &crate::svg::trend(&pts, true, "sector energy", "alpha", "energy"))?;
    }

    let mut green = Csv::new(&["a", "b", "energy", "expected", "flux"]);
    let mut greens = Vec::new();
    for &[a, b] in &e.green_levels {
        let g = green_energy_annulus(a, b).map_err(|err| match err {
            Error::Config { key, msg } => Error::config(format!("estimates.green_levels.{key}"), msg),
            other => other,
        })?;
        green.row(&[&a, &b, &g.energy, &g.expected, &g.flux]);
        greens.push(g);
    }
    out.write("green.csv", green.as_str())?;

    let mut qv = Csv::new(&["r0", "r_cap", "boundary", "value", "cap_sensitivity", "lo_sensitivity", "relative_lo_sensitivity"]);
    let mut qvs = Vec::new();
    if profile.is_radial() {
        for &r0 in &e.qv_r0s {
            let cap = e.qv_cap_factor * r0;
            if 2.0 * cap > jac.r_max() {
                skipped.push(format!("expected QV r0 = {r0}: doubled cap {} exceeds r_max", 2.0 * cap));
                continue;
            }
            for b in [InnerBoundary::Reflecting, InnerBoundary::Absorbing] {
                let q = expected_angular_qv(&jac, r0, DEFAULT_R_LO, cap, b)?;
                let name = match b {
                    InnerBoundary::Reflecting => "reflecting",
                    InnerBoundary::Absorbing => "absorbing",
                };
                qv.row(&[&r0, &cap, &name, &q.value, &q.cap_sensitivity, &q.lo_sensitivity, &q.relative_lo_sensitivity()]);
                qvs.push(q);
            }
        }
    }
    out.write("qv.csv", qv.as_str())?;
    lines.push(format!("sector energies: {}, green levels: {}, qv rows: {}", energies.len(), greens.len(), qvs.len()));
    for s in &skipped {
        lines.push(format!("skipped: {s}"));
    }

    #[derive(Serialize)]
    struct Lb {
        eps: f64,
        cutoff: f64,
        a: f64,
        c: f64,
        r_max: f64,
    }
    #[derive(Serialize)]
    struct R {
        classify: Vec<(f64, &'static str)>,
        lower_bound: Lb,
        sector_energy: Vec<crate::estimates::SectorEnergy>,
        green: Vec<crate::estimates::GreenEnergy>,
        qv: Vec<crate::estimates::QvEstimate>,
        skipped: Vec<String>,
    }
    write_report(
        out,
        cfg,
        &R {
            classify: verdicts.iter().map(|(c, v)| (*c, v.as_str())).collect(),
            lower_bound: Lb {
                eps: lb.eps,
                cutoff: lb.cutoff,
                a: lb.a,
                c: lb.c,
                r_max: lb.r_max,
            },
            sector_energy: energies,
            green: greens,
            qv: qvs,
            skipped,
        },
    )?;
    Ok(lines)
}

// ---------------------------------------------------------------- validate

fn validate(cfg: &ExperimentConfig, out: &mut OutputSet) -> Result<Vec<String>> {
    let checks = oracle_suite();
    let mut csv = Csv::new(&["check", "status", "detail"]);
    let mut lines = Vec::new();
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        csv.row(&[&c.name, &status, &c.detail.replace(',', ";")]);
        lines.push(format!("{status} {}: {}", c.name, c.detail));
    }
    out.write("validate.csv", csv.as_str())?;
    #[derive(Serialize)]
    struct R<'a> {
        checks: &'a [crate::validate::Check],
    }
    write_report(out, cfg, &R { checks: &checks })?;
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if !failed.is_empty() {
        for l in &lines {
            eprintln!("{l}");
        }
        return Err(Error::numerical("validate", "oracle_suite", format!("failed checks: {}", failed.join(", "))));
    }
    Ok(lines)
}

/// Default configuration for a subcommand run without `--config`.
pub fn default_config(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        kind,
        ..Default::default()
    };
    match kind {
        ExperimentKind::Dichotomy | ExperimentKind::Estimates => {
            cfg.profile.kind = "threshold".into();
            cfg.profile.kappa = None;
            cfg.profile.c = Some(2.0);
            cfg.profile.r_max = 1e6;
            let p = StepPolicy::relative();
            cfg.policy.dt_max = None;
            cfg.policy.delta_r = Some(p.delta_r);
            cfg.policy.c_drift = Some(p.c_drift);
            if kind == ExperimentKind::Dichotomy {
                cfg.mc.n_paths = 400;
            }
        }
        ExperimentKind::Coupled => {
            cfg.profile.kind = "perturbed".into();
            cfg.profile.base = Some("constant".into());
            cfg.profile.eta = Some(0.5);
            cfg.profile.mode = Some(3);
            cfg.profile.envelope = Some("ramp:0.5:1.5".into());
            cfg.mc.n_paths = 200;
            cfg.stop.r_inf = 8.0;
        }
        ExperimentKind::Dirichlet => {
            cfg.mc.n_paths = 400;
            cfg.stop.r_inf = 8.0;
        }
        _ => {}
    }
    cfg
}
