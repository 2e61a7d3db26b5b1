//! Continuous boundary data on the circle at infinity.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_BUMP_HALF_WIDTH: f64 = 0.5;

/// A continuous `2π`-periodic function of the boundary angle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum BoundaryFunction {
    Constant(f64),
    /// `cos(k(θ − phase))`.
    Cos { k: u32, phase: f64 },
    /// Raised cosine `½(1 + cos(π d/h))` for angular distance `d < h`, else 0.
    Bump { center: f64, half_width: f64 },
    /// Periodic linear interpolation through `(θ, value)` knots.
    PiecewiseLinear(Vec<(f64, f64)>),
    /// `Σ wᵢ gᵢ`.
    Sum(Vec<(f64, BoundaryFunction)>),
}

/// Signed angular difference reduced to `(−π, π]`.
pub fn wrap_angle(d: f64) -> f64 {
    let w = d.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

impl BoundaryFunction {
    pub fn cos(k: u32) -> Self {
        BoundaryFunction::Cos { k, phase: 0.0 }
    }

    pub fn bump(center: f64) -> Self {
        BoundaryFunction::Bump {
            center,
            half_width: DEFAULT_BUMP_HALF_WIDTH,
        }
    }

    /// Sorted, validated knot table.
    pub fn piecewise_linear(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::config("boundary", "piecewise-linear table needs at least one knot"));
        }
        for k in knots.iter_mut() {
            if !(k.0.is_finite() && k.1.is_finite()) {
                return Err(Error::config("boundary", "non-finite knot"));
            }
            k.0 = k.0.rem_euclid(TAU);
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if knots.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::config("boundary", "duplicate knot angle"));
        }
        Ok(BoundaryFunction::PiecewiseLinear(knots))
    }

    /// Parses `constant:v`, `cos:k`, `bump:center[:half_width]`, `pwl:θ/v,θ/v,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::config("boundary", format!("{m} in `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let mut parts = s.splitn(2, ':');
        let head = parts.next().unwrap_or("").trim();
        let rest = parts.next().unwrap_or("");
        match head {
            "constant" => Ok(BoundaryFunction::Constant(num(rest)?)),
            "cos" => {
                let k: u32 = rest.trim().parse().map_err(|_| bad("expected a non-negative integer mode"))?;
                Ok(BoundaryFunction::cos(k))
            }
            "bump" => {
                let f: Vec<&str> = rest.split(':').collect();
                let center = num(f[0])?;
                let half_width = if f.len() > 1 { num(f[1])? } else { DEFAULT_BUMP_HALF_WIDTH };
                if !(half_width > 0.0 && half_width <= PI) {
                    return Err(bad("bump half-width must lie in (0, π]"));
                }
                Ok(BoundaryFunction::Bump { center, half_width })
            }
            "pwl" => {
                let knots = rest
                    .split(',')
                    .map(|kv| {
                        let (a, b) = kv.split_once('/').ok_or_else(|| bad("knots are written angle/value"))?;
                        Ok((num(a)?, num(b)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::piecewise_linear(knots)
            }
            _ => Err(bad("unknown boundary function")),
        }
    }

    pub fn to_config_string(&self) -> String {
        match self {
            BoundaryFunction::Constant(v) => format!("constant:{v}"),
            BoundaryFunction::Cos { k, .. } => format!("cos:{k}"),
            BoundaryFunction::Bump { center, half_width } => format!("bump:{center}:{half_width}"),
            BoundaryFunction::PiecewiseLinear(k) => {
                let body: Vec<String> = k.iter().map(|(a, v)| format!("{a}/{v}")).collect();
                format!("pwl:{}", body.join(","))
            }
            BoundaryFunction::Sum(_) => "sum".into(),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            BoundaryFunction::Constant(v) => *v,
            BoundaryFunction::Cos { k, phase } => (*k as f64 * (theta - phase)).cos(),
            BoundaryFunction::Bump { center, half_width } => {
                let d = wrap_angle(theta - center).abs();
                if d < *half_width {
                    0.5 * (1.0 + (PI * d / half_width).cos())
                } else {
                    0.0
                }
            }
            BoundaryFunction::PiecewiseLinear(knots) => {
                let x = theta.rem_euclid(TAU);
                let n = knots.len();
                if n == 1 {
                    return knots[0].1;
                }
                let i = knots.partition_point(|k| k.0 <= x);
                let (a, b) = if i == 0 || i == n {
                    // wrap-around segment from the last knot to the first
                    let (l, f) = (knots[n - 1], knots[0]);
                    let span = f.0 + TAU - l.0;
                    let off = if i == 0 { x + TAU - l.0 } else { x - l.0 };
                    return l.1 + (f.1 - l.1) * off / span;
                } else {
                    (knots[i - 1], knots[i])
                };
                a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
            }
            BoundaryFunction::Sum(terms) => terms.iter().map(|(w, g)| w * g.eval(theta)).sum(),
        }
    }

    /// `(min g, max g)`; exact for the closed forms, sampled for sums.
    pub fn range(&self) -> (f64, f64) {
        match self {
            BoundaryFunction::Constant(v) => (*v, *v),
            BoundaryFunction::Cos { k: 0, .. } => (1.0, 1.0),
            BoundaryFunction::Cos { .. } => (-1.0, 1.0),
            BoundaryFunction::Bump { .. } => (0.0, 1.0),
            BoundaryFunction::PiecewiseLinear(k) => k
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(*v), hi.max(*v))),
            BoundaryFunction::Sum(_) => (0..4096)
                .map(|i| self.eval(i as f64 * TAU / 4096.0))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v))),
        }
    }
}
