//! Built-in oracle suite: closed forms every build must reproduce.

use std::f64::consts::{E, TAU};

use serde::Serialize;

use crate::dirichlet::{laplacian_apply, poisson_kernel_h2, PolarGrid};
use crate::error::Result;
use crate::estimates::{build_scale, classify_transience, green_energy_annulus, hitting_probability, Verdict};
use crate::geometry::{jacobi_lower_bound, solve_jacobi, CurvatureProfile};
use crate::quadrature::{integrate, QuadOpts};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn max_rel_err(profile: &CurvatureProfile, exact: impl Fn(f64) -> f64) -> Result<f64> {
    let jf = solve_jacobi(profile)?;
    Ok(jf
        .grid()
        .iter()
        .filter(|&&r| r > 0.0 && r <= 20.0)
        .map(|&r| ((jf.j(r) - exact(r)) / exact(r)).abs())
        .fold(0.0, f64::max))
}

/// Runs every check; numerical failures inside a check count as a failed check.
pub fn oracle_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut push = |name: &'static str, r: Result<(bool, String)>| {
        out.push(match r {
            Ok((pass, detail)) => check(name, pass, detail),
            Err(e) => check(name, false, format!("error: {e}")),
        })
    };

    push("jacobi_flat", (|| {
        let e = max_rel_err(&CurvatureProfile::constant(0.0, 20.0)?, |r| r)?;
        Ok((e <= 1e-8, format!("max rel err {e:.3e}")))
    })());
    push("jacobi_hyperbolic", (|| {
        let e = max_rel_err(&CurvatureProfile::constant(-1.0, 20.0)?, f64::sinh)?;
        Ok((e <= 1e-8, format!("max rel err {e:.3e}")))
    })());
    push("jacobi_lower_bound", (|| {
        let lb = jacobi_lower_bound(1.0, E)?;
        Ok((lb.c.is_finite() && lb.c > 0.0, format!("A = {:.6}, C = {:.6}", lb.a, lb.c)))
    })());
    push("poisson_normalization", (|| {
        let v = integrate(|t| poisson_kernel_h2(2.0, 0.0, t), 0.0, TAU, QuadOpts::default())?.value;
        Ok(((v - 1.0).abs() < 1e-10, format!("integral {v:.12}")))
    })());
    push("poisson_peak", {
        let rho = 1.0f64.tanh();
        let v = poisson_kernel_h2(2.0, 0.0, 0.0);
        let want = (1.0 + rho) / (TAU * (1.0 - rho));
        Ok(((v - want).abs() < 1e-12, format!("peak {v:.12}")))
    });
    push("green_energy", (|| {
        let g = green_energy_annulus(0.2, 0.8)?;
        Ok(((g.energy - 1.2).abs() < 1e-6, format!("energy {:.12}", g.energy)))
    })());
    push("green_flux", (|| {
        let g = green_energy_annulus(0.2, 0.8)?;
        Ok(((g.flux + 2.0).abs() < 1e-12, format!("flux {:.12}", g.flux)))
    })());
    push("scale_hyperbolic", (|| {
        let sc = build_scale(&solve_jacobi(&CurvatureProfile::constant(-1.0, 40.0)?)?)?;
        let exact = 1.0f64.sinh() * ((1.5f64).tanh().ln() - 0.5f64.tanh().ln());
        let e = (sc.s(3.0)? - exact).abs();
        Ok((e < 1e-9, format!("abs err {e:.3e}")))
    })());
    push("hitting_hyperbolic", (|| {
        let sc = build_scale(&solve_jacobi(&CurvatureProfile::constant(-1.0, 40.0)?)?)?;
        let p = hitting_probability(&sc, 3.0, 1.0)?;
        let want = 1.5f64.tanh().ln() / 0.5f64.tanh().ln();
        Ok(((p - want).abs() < 1e-9, format!("p {p:.9}")))
    })());
    push("dichotomy", (|| {
        let lo = classify_transience(&CurvatureProfile::threshold_default(0.5, 1e6)?)?;
        let hi = classify_transience(&CurvatureProfile::threshold_default(2.0, 1e6)?)?;
        Ok((
            lo == Verdict::Recurrent && hi == Verdict::Transient,
            format!("c=0.5 {}, c=2 {}", lo.as_str(), hi.as_str()),
        ))
    })());
    push("laplacian_second_order", (|| {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 10.0)?)?;
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> { (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect() };
        let err = |n: usize| -> Result<f64> {
            let u = PolarGrid::from_fn(lin(1.0, 2.0, n), lin(0.2, 1.2, n), |r, t| (r / 2.0).tanh() * t.cos());
            Ok(laplacian_apply(&u, &jf)?.max_abs())
        };
        let ratio = err(9)? / err(17)?;
        Ok((ratio > 3.5, format!("halving ratio {ratio:.3}")))
    })());
    out
}
