//! Radial comparison surfaces and certified Jacobi lower bounds.

use std::f64::consts::TAU;

use super::jacobi::{solve_jacobi_with, GridSpec, DEFAULT_RAYS};
use super::profile::{CurvatureProfile, ProfileKind};
use crate::error::{Error, Result};

/// `-(1+ε)/(r² log r)` for `r > cutoff`, else 0.
pub fn ceiling_curvature(eps: f64, cutoff: f64, r: f64) -> f64 {
    if r > cutoff {
        -(1.0 + eps) / (r * r * r.ln())
    } else {
        0.0
    }
}

/// Radial profile equal to the pointwise maximum over the ray fan of `K(r, θ_k)`.
/// Radial inputs are returned unchanged.
pub fn upper_envelope(profile: &CurvatureProfile) -> CurvatureProfile {
    upper_envelope_with_rays(profile, DEFAULT_RAYS)
}

pub fn upper_envelope_with_rays(profile: &CurvatureProfile, rays: usize) -> CurvatureProfile {
    match &profile.kind {
        ProfileKind::Perturbed {
            base,
            eta,
            mode,
            envelope,
        } => {
            // K_base <= 0, so the max over θ picks the smallest cosine on the fan
            let cos_min = (0..rays)
                .map(|k| (*mode as f64 * k as f64 * TAU / rays as f64).cos())
                .fold(f64::INFINITY, f64::min);
            CurvatureProfile {
                kind: ProfileKind::Modulated {
                    base: base.clone(),
                    scale: eta * cos_min,
                    envelope: *envelope,
                },
                r_max: profile.r_max,
            }
        }
        _ => profile.clone(),
    }
}

/// Radial comparison curvature `K̃` with `max_θ K ≤ K̃ ≤ min(0, ceiling)`.
///
/// The tight choice `K̃ = max_θ K` is returned; the ceiling is only checked.
pub fn comparison_profile(profile: &CurvatureProfile, eps: f64, cutoff: f64) -> Result<CurvatureProfile> {
    if !(eps > 0.0) {
        return Err(Error::precondition("comparison_profile", format!("margin must be positive, got {eps}")));
    }
    let env = upper_envelope(profile);
    let nodes = GridSpec::for_profile(profile).nodes(profile.r_max, &profile.breakpoints())?;
    for &r in &nodes {
        let k = env.k(r, 0.0);
        let ceil = ceiling_curvature(eps, cutoff, r);
        if k > 0.0 || k > ceil + 1e-12 * ceil.abs() {
            return Err(Error::precondition(
                "comparison_profile",
                format!("max_θ K({r}) = {k:e} exceeds the ceiling {ceil:e} (eps = {eps}, R = {cutoff})"),
            ));
        }
    }
    Ok(env)
}

/// Certified constants for `J(r) ≥ r (log r)^{1+ε} / C` when `r > A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub eps: f64,
    pub cutoff: f64,
    pub a: f64,
    pub c: f64,
    /// Supremum of `r (log r)^{1+ε} / J` over the grid beyond `A`.
    pub grid_sup: f64,
    /// Analytic bound on the same ratio beyond the end of the grid.
    pub tail_sup: f64,
    pub r_max: f64,
}

impl LowerBound {
    /// `r (log r)^{1+ε} / C`.
    pub fn bound(&self, r: f64) -> f64 {
        r * r.ln().powf(1.0 + self.eps) / self.c
    }

    /// `∫_x^∞ C / (r (log r)^{1+ε}) dr = C / (ε (log x)^ε)`, valid for `x ≥ A`.
    pub fn tail_integral(&self, x: f64) -> f64 {
        self.c / (self.eps * x.ln().powf(self.eps))
    }
}

pub const DEFAULT_BOUND_R_MAX: f64 = 1e6;

/// Certifies `(A, C)` from the extremal profile `K = -(1+ε)/(r² log r)` beyond `cutoff`.
///
/// Any profile with `K ≤ 0` everywhere and `K ≤ -(1+ε)/(r² log r)` for `r > cutoff`
/// has a larger Jacobi field, so the constants transfer to it.
pub fn jacobi_lower_bound(eps: f64, cutoff: f64) -> Result<LowerBound> {
    let profile = CurvatureProfile::ceiling(1.0 + eps, cutoff, DEFAULT_BOUND_R_MAX)?;
    jacobi_lower_bound_with(eps, cutoff, &GridSpec::for_profile(&profile), DEFAULT_BOUND_R_MAX)
}

pub fn jacobi_lower_bound_with(eps: f64, cutoff: f64, spec: &GridSpec, r_max: f64) -> Result<LowerBound> {
    if !(eps > 0.0) {
        return Err(Error::precondition("jacobi_lower_bound", format!("eps must be positive, got {eps}")));
    }
    if !(cutoff > 1.0) {
        return Err(Error::precondition("jacobi_lower_bound", format!("cutoff must exceed 1, got {cutoff}")));
    }
    let c = 1.0 + eps;
    let profile = CurvatureProfile::ceiling(c, cutoff, r_max)?;
    let field = solve_jacobi_with(&profile, spec)?;
    let n = field.grid().len();

    // Beyond r_max: q = rJ'/J - 1 solves q' = c/t - q - q² in t = log r, and
    // q_sub = c/t - c(c-1)/t² is a subsolution once t ≥ c/2.
    let (j_end, dj_end) = field.node(n - 1, 0);
    let t_end = r_max.ln();
    let q_end = r_max * dj_end / j_end - 1.0;
    let q_sub = c / t_end - c * (c - 1.0) / (t_end * t_end);
    if t_end < c / 2.0 || q_end < q_sub {
        return Err(Error::numerical(
            "geometry",
            "jacobi_lower_bound",
            format!("tail comparison not established at r_max = {r_max} (q = {q_end}, needs >= {q_sub})"),
        ));
    }
    let tail_sup = r_max * t_end.powf(c) / j_end * (c * (c - 1.0) / t_end).exp();

    let a = cutoff.max((c / 2.0).exp());
    let mut grid_sup = 0.0f64;
    for i in 0..n {
        let r = field.grid()[i];
        if r <= a {
            continue;
        }
        let (j, _) = field.node(i, 0);
        grid_sup = grid_sup.max(r * r.ln().powf(c) / j);
    }
    if !(grid_sup > 0.0 && grid_sup.is_finite()) {
        return Err(Error::numerical("geometry", "jacobi_lower_bound", "no grid points beyond A"));
    }
    Ok(LowerBound {
        eps,
        cutoff,
        a,
        c: 1.1 * grid_sup.max(tail_sup),
        grid_sup,
        tail_sup,
        r_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::jacobi::solve_jacobi;
    use crate::geometry::profile::Envelope;
    use std::f64::consts::E;

    #[test]
    fn radial_profile_is_its_own_envelope() {
        let p = CurvatureProfile::threshold_default(2.0, 1e3).unwrap();
        assert_eq!(comparison_profile(&p, 0.5, 2.0 * E).unwrap(), p);
    }

    #[test]
    fn perturbed_envelope_is_pointwise_max() {
        let base = CurvatureProfile::threshold_default(4.0, 1e3).unwrap();
        let p = CurvatureProfile::perturbed(base.clone(), 0.5, 3, Envelope::One).unwrap();
        let env = comparison_profile(&p, 1.0, 2.0 * E).unwrap();
        for r in [3.0, 7.0, 50.0, 900.0] {
            let brute = (0..DEFAULT_RAYS)
                .map(|k| p.k(r, k as f64 * TAU / DEFAULT_RAYS as f64))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((env.k(r, 0.0) - brute).abs() < 1e-15);
            // with cos(3θ) sampled on 256 rays the minimum cosine is within 1e-3 of -1
            assert!((env.k(r, 0.0) - base.k(r, 0.0) * 0.5).abs() <= 1e-3 * base.k(r, 0.0).abs());
        }
    }

    #[test]
    fn constant_minus_one_stays_below_ceiling() {
        let p = CurvatureProfile::constant(-1.0, 50.0).unwrap();
        let env = comparison_profile(&p, 1.0, E).unwrap();
        assert_eq!(env.k(30.0, 0.0), -1.0);
        assert!(env.k(30.0, 0.0) <= ceiling_curvature(1.0, E, 30.0));
    }

    #[test]
    fn hypothesis_violation_is_reported() {
        // c = 1.5 cannot dominate the ceiling for eps = 1
        let p = CurvatureProfile::threshold_default(1.5, 1e3).unwrap();
        assert!(matches!(comparison_profile(&p, 1.0, 2.0 * E), Err(Error::Precondition { .. })));
    }

    #[test]
    fn lower_bound_holds_on_grid_and_under_refinement() {
        let lb = jacobi_lower_bound(1.0, E).unwrap();
        assert!(lb.a >= E && lb.c > 0.0 && lb.c.is_finite());
        let prof = CurvatureProfile::ceiling(2.0, E, DEFAULT_BOUND_R_MAX).unwrap();
        let spec = GridSpec::for_profile(&prof);
        let field = solve_jacobi(&prof).unwrap();
        for (i, &r) in field.grid().iter().enumerate() {
            if r > lb.a {
                assert!(field.node(i, 0).0 * lb.c >= r * r.ln().powi(2));
            }
        }
        let fine = jacobi_lower_bound_with(1.0, E, &spec.refined(), DEFAULT_BOUND_R_MAX).unwrap();
        assert_eq!(fine.a, lb.a);
        assert!((fine.c - lb.c).abs() < 1e-6 * lb.c);
        let fine_field = solve_jacobi_with(&prof, &spec.refined()).unwrap();
        for (i, &r) in fine_field.grid().iter().enumerate() {
            if r > lb.a {
                assert!(fine_field.node(i, 0).0 * lb.c >= r * r.ln().powi(2));
            }
        }
    }

    #[test]
    fn sinh_dominates_polylog_bound() {
        let lb = jacobi_lower_bound(1.0, E).unwrap();
        let mut r = lb.a * 1.0001;
        while r < 700.0 {
            assert!(r.sinh() * lb.c >= r * r.ln().powi(2));
            r *= 1.05;
        }
    }
}
