//! Energy integrals: the sector energy `∫∫ 1/J` and the Green's-function
//! energy identity on the hyperbolic plane.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{comparison_profile, JacobiField, LowerBound};
use crate::quadrature::{integrate, QuadOpts};

/// Energy of `θ` over the truncated sector `{r > α, |θ − θ₀| < β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorEnergy {
    pub alpha: f64,
    pub beta: f64,
    /// `∫_α^{r_max} ∫ 1/J dθ dr`.
    pub quadrature: f64,
    pub quadrature_error: f64,
    /// Certified bound on the remainder beyond `r_max`.
    pub tail_bound: f64,
    /// `quadrature + tail_bound`.
    pub upper: f64,
    /// `2βC/(ε (log α)^ε)`.
    pub lemma_bound: f64,
}

/// Quadrature of `1/J` over the sector, with a tail remainder certified by `bound`.
///
/// The profile must satisfy the hypothesis behind `bound` (checked via
/// [`comparison_profile`]); without a certificate the tail cannot be bounded.
pub fn sector_energy(
    jacobi: &JacobiField,
    alpha: f64,
    beta: f64,
    theta0: f64,
    bound: Option<&LowerBound>,
) -> Result<SectorEnergy> {
    let lb = bound.ok_or_else(|| {
        Error::precondition("sector_energy", "no certified (A, C): run jacobi_lower_bound first")
    })?;
    comparison_profile(jacobi.profile(), lb.eps, lb.cutoff)?;
    let r_max = jacobi.r_max();
    if !(alpha >= lb.a && alpha < r_max) {
        return Err(Error::domain("sector_energy", format!("need A = {} <= alpha < r_max, got {alpha}", lb.a)));
    }
    if !(beta >= 0.0 && beta <= PI) {
        return Err(Error::domain("sector_energy", format!("half-width must lie in [0, π], got {beta}")));
    }
    let opts = QuadOpts::with_tol(1e-14, 1e-10);
    let g = jacobi.grid();
    let mut pts = vec![alpha];
    pts.extend(g.iter().copied().filter(|&r| r > alpha && r < r_max));
    pts.push(r_max);

    let mut value = 0.0;
    let mut err = 0.0;
    for w in pts.windows(2) {
        let res = if jacobi.is_radial() {
            let q = integrate(|r| 1.0 / jacobi.j(r), w[0], w[1], opts)?;
            crate::quadrature::QuadResult {
                value: 2.0 * beta * q.value,
                error: 2.0 * beta * q.error,
                intervals: q.intervals,
            }
        } else {
            let mut inner_err = 0.0;
            let q = integrate(
                |r| match integrate(|t| 1.0 / jacobi.local(r, t).j, theta0 - beta, theta0 + beta, opts) {
                    Ok(v) => {
                        inner_err += v.error;
                        v.value
                    }
                    Err(_) => f64::NAN,
                },
                w[0],
                w[1],
                opts,
            )?;
            if !q.value.is_finite() {
                return Err(Error::numerical("estimates", "sector_energy", "angular quadrature failed"));
            }
            q
        };
        value += res.value;
        err += res.error;
    }
    let tail_bound = 2.0 * beta * lb.tail_integral(r_max);
    Ok(SectorEnergy {
        alpha,
        beta,
        quadrature: value,
        quadrature_error: err,
        tail_bound,
        upper: value + tail_bound,
        lemma_bound: 2.0 * beta * lb.tail_integral(alpha),
    })
}

/// Whole-plane Green's function of `Δ/2` on the hyperbolic plane, unit point mass.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct GreenOracleH2;

impl GreenOracleH2 {
    /// `G(d) = −(1/π) log tanh(d/2)`.
    pub fn green(&self, d: f64) -> f64 {
        -(d / 2.0).tanh().ln() / PI
    }

    /// `G′(d) = −1/(π sinh d)`.
    pub fn radial_derivative(&self, d: f64) -> f64 {
        -1.0 / (PI * d.sinh())
    }

    /// Distance of the level set `{G = level}`.
    pub fn level_distance(&self, level: f64) -> f64 {
        2.0 * (-PI * level).exp().atanh()
    }

    /// Outward flux of `∇G` through the geodesic circle of radius `d`.
    pub fn flux(&self, d: f64) -> f64 {
        self.radial_derivative(d) * 2.0 * PI * d.sinh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenEnergy {
    pub a: f64,
    pub b: f64,
    pub energy: f64,
    /// `2(b − a)`.
    pub expected: f64,
    /// Flux through the level set `G = (a+b)/2`.
    pub flux: f64,
}

/// `∫_{a ≤ G ≤ b} |∇G|²` by radial reduction: `(2/π)∫_{d_b}^{d_a} dd/sinh d`.
pub fn green_energy_annulus(a: f64, b: f64) -> Result<GreenEnergy> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::config("a", format!("level must lie in (0, 1), got {a}")));
    }
    if !(b >= a && b < 1.0) {
        return Err(Error::config("b", format!("level must lie in [a, 1), got {b}")));
    }
    let g = GreenOracleH2;
    let (d_a, d_b) = (g.level_distance(a), g.level_distance(b));
    let q = integrate(|d| 2.0 / (PI * d.sinh()), d_b, d_a, QuadOpts::with_tol(1e-14, 1e-13))?;
    Ok(GreenEnergy {
        a,
        b,
        energy: q.value,
        expected: 2.0 * (b - a),
        flux: g.flux(g.level_distance(0.5 * (a + b))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{jacobi_lower_bound, solve_jacobi, CurvatureProfile};
    use std::f64::consts::E;

    #[test]
    fn green_identity() {
        let e = green_energy_annulus(0.2, 0.8).unwrap();
        assert!((e.energy - 1.2).abs() < 1e-9);
        assert!((e.flux + 2.0).abs() < 1e-12);
        assert_eq!(green_energy_annulus(0.4, 0.4).unwrap().energy, 0.0);
        let (x, y, z) = (0.1, 0.35, 0.9);
        let sum = green_energy_annulus(x, y).unwrap().energy + green_energy_annulus(y, z).unwrap().energy;
        assert!((green_energy_annulus(x, z).unwrap().energy - sum).abs() < 1e-9);
    }

    #[test]
    fn green_rejects_unit_level() {
        assert!(matches!(green_energy_annulus(0.2, 1.0), Err(Error::Config { key, .. }) if key == "b"));
    }

    #[test]
    fn green_oracle_shape() {
        let g = GreenOracleH2;
        let mut last = f64::INFINITY;
        for d in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let v = g.green(d);
            assert!(v > 0.0 && v < last);
            assert!((g.level_distance(v) - d).abs() < 1e-9 * d.max(1.0));
            last = v;
        }
    }

    #[test]
    fn sector_energy_needs_certificate() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 30.0).unwrap()).unwrap();
        assert!(matches!(sector_energy(&jf, 3.0, 0.5, 0.0, None), Err(Error::Precondition { .. })));
    }

    #[test]
    fn hyperbolic_sector_energy_closed_form() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 30.0).unwrap()).unwrap();
        let lb = jacobi_lower_bound(1.0, E).unwrap();
        let beta = std::f64::consts::FRAC_PI_2;
        let alpha = 3.0;
        let e = sector_energy(&jf, alpha, beta, 0.0, Some(&lb)).unwrap();
        // ∫_α^∞ dr/sinh r = −log tanh(α/2)
        let exact = -2.0 * beta * (alpha / 2.0).tanh().ln();
        assert!((e.quadrature - exact).abs() < 1e-9);
        assert!(e.upper <= e.lemma_bound);
    }

    #[test]
    fn sector_energy_is_linear_in_beta() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 30.0).unwrap()).unwrap();
        let lb = jacobi_lower_bound(1.0, E).unwrap();
        let e1 = sector_energy(&jf, 3.0, 0.01, 0.0, Some(&lb)).unwrap();
        let e2 = sector_energy(&jf, 3.0, 0.02, 0.0, Some(&lb)).unwrap();
        assert!((e2.quadrature - 2.0 * e1.quadrature).abs() < 1e-12);
    }
}
