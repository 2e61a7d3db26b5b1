//! Scale function of the radial diffusion and the transience verdict.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{solve_jacobi, upper_envelope, CurvatureProfile, JacobiField};
use crate::quadrature::{cumulative, integrate, QuadOpts};

/// Reference radius where `s(r_ref) = 0`.
pub const R_REF: f64 = 1.0;

/// Local growth exponent above which the tail of `∫dρ/J` is judged convergent.
pub const EXPONENT_TRANSIENT: f64 = 1.05;
/// ... and below which it is judged divergent.
pub const EXPONENT_RECURRENT: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Transient,
    Recurrent,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Transient => "transient",
            Verdict::Recurrent => "recurrent",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Behaviour of `s(r)` as `r → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ScaleLimit {
    Finite(f64),
    Divergent,
    Inconclusive,
}

/// `s(r) = ∫_1^r J(1)/J(ρ) dρ` on the Jacobi grid.
#[derive(Debug, Clone)]
pub struct ScaleTable {
    grid: Vec<f64>,
    s: Vec<f64>,
    ds: Vec<f64>,
    j_ref: f64,
    pub s_inf: ScaleLimit,
    /// `log r·(r J'/J − 1)` at `r_max/2` and `r_max`; `J ≈ r(log r)^p` locally.
    pub tail_exponents: (f64, f64),
}

fn log_exponent(jacobi: &JacobiField, r: f64) -> f64 {
    let l = jacobi.local(r, 0.0);
    r.ln() * (r * l.dj_dr / l.j - 1.0)
}

/// Builds the scale table of a radial field.
pub fn build_scale(jacobi: &JacobiField) -> Result<ScaleTable> {
    if !jacobi.is_radial() {
        return Err(Error::precondition("build_scale", "scale functions need a radial profile"));
    }
    let r_max = jacobi.r_max();
    if r_max <= 10.0 * R_REF {
        return Err(Error::precondition("build_scale", format!("r_max = {r_max} is too small for a tail test")));
    }
    let grid: Vec<f64> = jacobi.grid().iter().copied().filter(|&r| r > 0.0).collect();
    let j_ref = jacobi.j(R_REF);
    let f = |r: f64| j_ref / jacobi.j(r);
    let opts = QuadOpts::with_tol(1e-14, 1e-12);
    let cum = cumulative(f, &grid, opts)?;
    let at_ref = cum[0] + integrate(f, grid[0], R_REF, opts)?.value;
    let s: Vec<f64> = cum.iter().map(|c| c - at_ref).collect();
    let ds: Vec<f64> = grid.iter().map(|&r| f(r)).collect();

    let s_max = *s.last().expect("grid is non-empty");
    let tail_half = integrate(f, r_max / 2.0, r_max, opts)?.value;
    let p_far = log_exponent(jacobi, r_max);
    let p_near = log_exponent(jacobi, r_max / 2.0);
    let s_inf = if tail_half < 1e-6 * s_max.abs() {
        // exponentially small tail: one geometric (Richardson-type) extrapolation step
        let tail_quarter = integrate(f, r_max / 4.0, r_max / 2.0, opts)?.value;
        let ratio = tail_half / tail_quarter;
        let extra = if ratio < 1.0 { tail_half * ratio / (1.0 - ratio) } else { tail_half };
        ScaleLimit::Finite(s_max + extra)
    } else if p_far > EXPONENT_TRANSIENT && p_near > EXPONENT_TRANSIENT {
        // J ≈ J(r_m)(r/r_m)(log r/log r_m)^p beyond r_max
        let t = r_max.ln();
        ScaleLimit::Finite(s_max + f(r_max) * r_max * t / (p_far - 1.0))
    } else if p_far < EXPONENT_RECURRENT && p_near < EXPONENT_RECURRENT {
        ScaleLimit::Divergent
    } else {
        ScaleLimit::Inconclusive
    };
    Ok(ScaleTable {
        grid,
        s,
        ds,
        j_ref,
        s_inf,
        tail_exponents: (p_near, p_far),
    })
}

impl ScaleTable {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.s
    }

    pub fn j_ref(&self) -> f64 {
        self.j_ref
    }

    pub fn verdict(&self) -> Verdict {
        match self.s_inf {
            ScaleLimit::Finite(_) => Verdict::Transient,
            ScaleLimit::Divergent => Verdict::Recurrent,
            ScaleLimit::Inconclusive => Verdict::Inconclusive,
        }
    }

    /// `s(r)`, Hermite-interpolated with slopes `J(1)/J`.
    pub fn s(&self, r: f64) -> Result<f64> {
        let n = self.grid.len();
        if !(r > 0.0) || r > self.grid[n - 1] * (1.0 + 1e-12) {
            return Err(Error::domain("scale", format!("r = {r} outside (0, {}]", self.grid[n - 1])));
        }
        if r < self.grid[0] {
            // J ≈ r near the pole
            return Ok(self.s[0] + self.j_ref * (r / self.grid[0]).ln());
        }
        let i = self.grid.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        let h = self.grid[i + 1] - self.grid[i];
        let t = (r - self.grid[i]) / h;
        let (h00, h10, h01, h11) = (
            (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t),
            t * (1.0 - t) * (1.0 - t),
            t * t * (3.0 - 2.0 * t),
            t * t * (t - 1.0),
        );
        Ok(h00 * self.s[i] + h10 * h * self.ds[i] + h01 * self.s[i + 1] + h11 * h * self.ds[i + 1])
    }

    /// Writes `r,s` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,s")?;
        for (r, s) in self.grid.iter().zip(&self.s) {
            writeln!(w, "{r},{s}")?;
        }
        Ok(())
    }
}

/// Transience verdict for a profile.
///
/// Perturbed profiles are judged through their radial upper envelope, which has
/// the smaller Jacobi field: a transient envelope forces transience, anything
/// else is inconclusive.
pub fn classify_transience(profile: &CurvatureProfile) -> Result<Verdict> {
    if profile.is_radial() {
        return Ok(build_scale(&solve_jacobi(profile)?)?.verdict());
    }
    let env = upper_envelope(profile);
    Ok(match build_scale(&solve_jacobi(&env)?)?.verdict() {
        Verdict::Transient => Verdict::Transient,
        _ => Verdict::Inconclusive,
    })
}

/// `P(hit α before ∞)` from `r₀`: `(s_∞ − s(r₀))/(s_∞ − s(α))`.
///
/// Recurrent surfaces return 1; an inconclusive tail is an error.
pub fn hitting_probability(scale: &ScaleTable, r0: f64, alpha: f64) -> Result<f64> {
    check_radii(r0, alpha)?;
    match scale.s_inf {
        ScaleLimit::Divergent => Ok(1.0),
        ScaleLimit::Inconclusive => Err(Error::Inconclusive(
            "scale tail undecided at this r_max; rebuild with a larger r_max".into(),
        )),
        ScaleLimit::Finite(s_inf) => {
            if r0 == alpha {
                return Ok(1.0);
            }
            Ok(((s_inf - scale.s(r0)?) / (s_inf - scale.s(alpha)?)).clamp(0.0, 1.0))
        }
    }
}

/// `P(hit α before r_out)` from `r₀ ∈ [α, r_out]`.
pub fn hitting_probability_between(scale: &ScaleTable, r0: f64, alpha: f64, r_out: f64) -> Result<f64> {
    check_radii(r0, alpha)?;
    if !(r_out >= r0) {
        return Err(Error::domain("hitting_probability", format!("need r0 <= r_out, got {r0} > {r_out}")));
    }
    if r0 == alpha {
        return Ok(1.0);
    }
    let so = scale.s(r_out)?;
    Ok(((so - scale.s(r0)?) / (so - scale.s(alpha)?)).clamp(0.0, 1.0))
}

fn check_radii(r0: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= r0) {
        return Err(Error::domain("hitting_probability", format!("need 0 < alpha <= r0, got alpha = {alpha}, r0 = {r0}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CurvatureProfile, Envelope};

    #[test]
    fn flat_scale_is_log_and_divergent() {
        let jf = solve_jacobi(&CurvatureProfile::constant(0.0, 1e6).unwrap()).unwrap();
        let sc = build_scale(&jf).unwrap();
        for r in [0.01, 0.5, 3.0, 1e3, 9e5] {
            assert!((sc.s(r).unwrap() - r.ln()).abs() < 1e-9, "{r}");
        }
        assert_eq!(sc.s_inf, ScaleLimit::Divergent);
    }

    #[test]
    fn hyperbolic_scale_closed_form() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 40.0).unwrap()).unwrap();
        let sc = build_scale(&jf).unwrap();
        let j1 = 1.0f64.sinh();
        let exact = |r: f64| j1 * ((r / 2.0).tanh().ln() - 0.5f64.tanh().ln());
        for r in [0.1, 1.0, 2.5, 10.0, 35.0] {
            assert!((sc.s(r).unwrap() - exact(r)).abs() < 1e-9, "{r}");
        }
        match sc.s_inf {
            ScaleLimit::Finite(v) => assert!((v - exact(1e3)).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hitting_probability_hyperbolic() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 40.0).unwrap()).unwrap();
        let sc = build_scale(&jf).unwrap();
        let p = hitting_probability(&sc, 3.0, 1.0).unwrap();
        let exact = 1.5f64.tanh().ln() / 0.5f64.tanh().ln();
        assert!((p - exact).abs() < 1e-9);
        assert!((exact - 0.129).abs() < 5e-4);
        assert_eq!(hitting_probability(&sc, 2.0, 2.0).unwrap(), 1.0);
        let mut last = 1.0;
        for r0 in [1.5, 3.0, 6.0, 12.0, 24.0] {
            let p = hitting_probability(&sc, r0, 1.0).unwrap();
            assert!(p < last);
            last = p;
        }
        let between = hitting_probability_between(&sc, 3.0, 1.0, 12.0).unwrap();
        assert!(between < p && p - between < 1e-4);
    }

    #[test]
    fn dichotomy_verdicts() {
        let v = |c: f64| classify_transience(&CurvatureProfile::threshold_default(c, 1e6).unwrap()).unwrap();
        assert_eq!(v(0.5), Verdict::Recurrent);
        assert_eq!(v(0.9), Verdict::Recurrent);
        assert_eq!(v(1.1), Verdict::Transient);
        assert_eq!(v(2.0), Verdict::Transient);
        assert_eq!(v(1.0), Verdict::Inconclusive);
        assert_eq!(classify_transience(&CurvatureProfile::constant(-1.0, 50.0).unwrap()).unwrap(), Verdict::Transient);
    }

    #[test]
    fn perturbed_uses_envelope() {
        let base = CurvatureProfile::constant(-1.0, 50.0).unwrap();
        let p = CurvatureProfile::perturbed(base, 0.5, 3, Envelope::One).unwrap();
        assert_eq!(classify_transience(&p).unwrap(), Verdict::Transient);
    }

    #[test]
    fn inconclusive_tail_blocks_hitting_probability() {
        let jf = solve_jacobi(&CurvatureProfile::threshold_default(1.0, 1e6).unwrap()).unwrap();
        let sc = build_scale(&jf).unwrap();
        assert!(matches!(hitting_probability(&sc, 50.0, 5.0), Err(Error::Inconclusive(_))));
    }
}
