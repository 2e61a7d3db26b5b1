//! Expected total angular quadratic variation `E⟨θ⟩` of a radial surface.
//!
//! With `S(x, y) = ∫_x^y dρ/J` the radial process satisfies `d S = dW/J`, so
//! `⟨θ⟩ = ⟨S(r)⟩` and the Poisson problem `½u″ + ½(J′/J)u′ = −1/J²` integrates
//! in closed form once `S` is known:
//!
//! * absorbing at `r_lo` and `r_cap`: `u(x) = S(r_lo, x)·S(x, r_cap)`;
//! * reflecting at `r_lo`, absorbing at `r_cap`: `u(x) = S(x, r_cap)·(S(x, r_cap) + 2·S(r_lo, x))`.
//!
//! The pole is an entrance boundary and `∫ dρ/J` diverges logarithmically there,
//! so the reflecting value grows like `2·S(x, r_cap)·log(1/r_lo)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::JacobiField;
use crate::quadrature::{integrate, QuadOpts};

pub const DEFAULT_R_LO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InnerBoundary {
    Reflecting,
    Absorbing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QvEstimate {
    pub value: f64,
    pub r0: f64,
    pub r_lo: f64,
    pub r_cap: f64,
    pub boundary: InnerBoundary,
    /// `u` with `r_cap` doubled, minus `u`.
    pub cap_sensitivity: f64,
    /// `u` with `r_lo` halved, minus `u`.
    pub lo_sensitivity: f64,
}

impl QvEstimate {
    pub fn relative_lo_sensitivity(&self) -> f64 {
        self.lo_sensitivity / self.value
    }
}

fn inv_j_integral(jacobi: &JacobiField, a: f64, b: f64) -> Result<f64> {
    // split at grid nodes so every panel sees a smooth integrand
    let g = jacobi.grid();
    let lo = g.partition_point(|&x| x <= a);
    let hi = g.partition_point(|&x| x < b);
    let mut pts = vec![a];
    pts.extend_from_slice(&g[lo..hi]);
    pts.push(b);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += integrate(|r| 1.0 / jacobi.j(r), w[0], w[1], QuadOpts::with_tol(1e-15, 1e-12))
            .map_err(|e| Error::numerical("estimates", "expected_angular_qv", e.to_string()))?
            .value;
    }
    Ok(acc)
}

fn qv_value(jacobi: &JacobiField, r0: f64, r_lo: f64, r_cap: f64, boundary: InnerBoundary) -> Result<f64> {
    let inner = inv_j_integral(jacobi, r_lo, r0)?;
    let outer = inv_j_integral(jacobi, r0, r_cap)?;
    Ok(match boundary {
        InnerBoundary::Absorbing => inner * outer,
        InnerBoundary::Reflecting => outer * (outer + 2.0 * inner),
    })
}

/// `E⟨θ⟩` from `r₀` until `r_cap`, with the pole replaced by a boundary at `r_lo`.
pub fn expected_angular_qv(
    jacobi: &JacobiField,
    r0: f64,
    r_lo: f64,
    r_cap: f64,
    boundary: InnerBoundary,
) -> Result<QvEstimate> {
    if !jacobi.is_radial() {
        return Err(Error::precondition("expected_angular_qv", "needs a radial profile"));
    }
    if !(r_lo > 0.0 && r_lo <= r0 && r0 <= r_cap) {
        return Err(Error::domain("expected_angular_qv", format!("need 0 < r_lo <= r0 <= r_cap, got {r_lo}, {r0}, {r_cap}")));
    }
    if 2.0 * r_cap > jacobi.r_max() {
        return Err(Error::domain(
            "expected_angular_qv",
            format!("doubled r_cap = {} exceeds r_max = {}", 2.0 * r_cap, jacobi.r_max()),
        ));
    }
    let value = qv_value(jacobi, r0, r_lo, r_cap, boundary)?;
    let doubled = qv_value(jacobi, r0, r_lo, 2.0 * r_cap, boundary)?;
    let halved = qv_value(jacobi, r0, r_lo / 2.0, r_cap, boundary)?;
    if !value.is_finite() {
        return Err(Error::numerical("estimates", "expected_angular_qv", "non-finite solution"));
    }
    Ok(QvEstimate {
        value,
        r0,
        r_lo,
        r_cap,
        boundary,
        cap_sensitivity: doubled - value,
        lo_sensitivity: halved - value,
    })
}
