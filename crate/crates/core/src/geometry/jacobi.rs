//! Tabulated solutions of the Jacobi equation `J'' = -K·J`, `J(0) = 0`, `J'(0) = 1`.
//!
//! Radial profiles are solved once. Perturbed profiles are solved along a
//! uniform fan of rays, each carrying the θ-derivative `∂θJ` obtained from the
//! differentiated equation `(∂θJ)'' = -K·∂θJ - ∂θK·J`. Lookups use cubic
//! Hermite interpolation in `r` (the tabulated slopes are exact ODE values)
//! and, across rays, cubic Hermite interpolation in θ using `∂θJ`.

use std::f64::consts::TAU;
use std::io::Write;

use rayon::prelude::*;

use super::profile::CurvatureProfile;
use crate::error::{Error, Result};
use crate::ode::{solve_on_grid, OdeOpts};

/// Number of rays used for perturbed profiles.
pub const DEFAULT_RAYS: usize = 256;

/// Step-size policy for the tabulation grid: uniform `min_step` near the
/// pole, then geometric growth `rel_step·r`, capped at `max_step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min_step: f64,
    pub rel_step: f64,
    pub max_step: f64,
    pub min_points: usize,
    pub rays: usize,
}

impl GridSpec {
    pub fn for_profile(profile: &CurvatureProfile) -> Self {
        GridSpec {
            min_step: 1e-3,
            rel_step: 0.01,
            max_step: (0.02 * profile.length_scale()).max(1e-3),
            min_points: 100,
            rays: DEFAULT_RAYS,
        }
    }

    /// Every step halved.
    pub fn refined(&self) -> Self {
        GridSpec {
            min_step: self.min_step / 2.0,
            rel_step: self.rel_step / 2.0,
            max_step: self.max_step / 2.0,
            min_points: self.min_points * 2,
            rays: self.rays,
        }
    }

    pub fn nodes(&self, r_max: f64, breakpoints: &[f64]) -> Result<Vec<f64>> {
        if !(self.min_step > 0.0 && self.rel_step > 0.0 && self.max_step >= self.min_step) {
            return Err(Error::config("grid", "grid steps must be positive with max_step >= min_step"));
        }
        let mut scale = 1.0;
        loop {
            let nodes = self.build(r_max, breakpoints, scale);
            if nodes.len() >= self.min_points.max(2) {
                return Ok(nodes);
            }
            scale *= 0.5;
        }
    }

    fn build(&self, r_max: f64, breakpoints: &[f64], scale: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut r = 0.0;
        let mut bp = breakpoints.iter().copied().filter(|&b| b > 0.0 && b < r_max).peekable();
        while r < r_max {
            let h = (self.rel_step * r).clamp(self.min_step, self.max_step) * scale;
            let mut next = r + h;
            if let Some(&b) = bp.peek() {
                if b <= next + 0.25 * h {
                    next = b;
                    bp.next();
                }
            }
            if next >= r_max - 0.25 * h {
                next = r_max;
            }
            out.push(next);
            r = next;
        }
        out
    }
}

/// Local metric data at a point: `J`, `∂rJ`, `∂θJ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Local {
    pub j: f64,
    pub dj_dr: f64,
    pub dj_dtheta: f64,
}

#[derive(Debug, Clone)]
struct RadialTable {
    j: Vec<f64>,
    dj: Vec<f64>,
    d2j: Vec<f64>,
}

#[derive(Debug, Clone)]
struct RayTable {
    n_rays: usize,
    dtheta: f64,
    // ray-major: index k * n + i
    j: Vec<f64>,
    dj: Vec<f64>,
    d2j: Vec<f64>,
    jt: Vec<f64>,
    djt: Vec<f64>,
    d2jt: Vec<f64>,
}

/// Jacobi-field length `J` on a tabulation grid; defines `ds² = dr² + J²dθ²`.
#[derive(Debug, Clone)]
pub struct JacobiField {
    profile: CurvatureProfile,
    grid: Vec<f64>,
    radial: Option<RadialTable>,
    rays: Option<RayTable>,
}

/// Solves the Jacobi equation with the default grid for `profile`.
pub fn solve_jacobi(profile: &CurvatureProfile) -> Result<JacobiField> {
    solve_jacobi_with(profile, &GridSpec::for_profile(profile))
}

pub fn solve_jacobi_with(profile: &CurvatureProfile, spec: &GridSpec) -> Result<JacobiField> {
    profile.validate()?;
    let grid = spec.nodes(profile.r_max, &profile.breakpoints())?;
    if grid.len() < 100 {
        return Err(Error::config("grid", format!("grid has {} points, need at least 100", grid.len())));
    }
    let opts = OdeOpts::default();
    if profile.is_radial() {
        let sol = solve_on_grid(
            |r, y: &[f64; 2]| [y[1], -profile.k(r, 0.0) * y[0]],
            [0.0, 1.0],
            &grid,
            opts,
        )
        .map_err(|e| Error::numerical("geometry", "solve_jacobi", e.to_string()))?;
        let j: Vec<f64> = sol.iter().map(|y| y[0]).collect();
        let dj: Vec<f64> = sol.iter().map(|y| y[1]).collect();
        let d2j = grid.iter().zip(&j).map(|(&r, &jv)| -profile.k(r, 0.0) * jv).collect();
        return Ok(JacobiField {
            profile: profile.clone(),
            grid,
            radial: Some(RadialTable { j, dj, d2j }),
            rays: None,
        });
    }

    let n_rays = spec.rays.max(4);
    let dtheta = TAU / n_rays as f64;
    let per_ray: Vec<Result<Vec<[f64; 4]>>> = (0..n_rays)
        .into_par_iter()
        .map(|k| {
            let th = k as f64 * dtheta;
            solve_on_grid(
                |r, y: &[f64; 4]| {
                    let kk = profile.k(r, th);
                    [y[1], -kk * y[0], y[3], -kk * y[2] - profile.dk_dtheta(r, th) * y[0]]
                },
                [0.0, 1.0, 0.0, 0.0],
                &grid,
                opts,
            )
        })
        .collect();
    let n = grid.len();
    let mut t = RayTable {
        n_rays,
        dtheta,
        j: Vec::with_capacity(n * n_rays),
        dj: Vec::with_capacity(n * n_rays),
        d2j: Vec::with_capacity(n * n_rays),
        jt: Vec::with_capacity(n * n_rays),
        djt: Vec::with_capacity(n * n_rays),
        d2jt: Vec::with_capacity(n * n_rays),
    };
    for (k, sol) in per_ray.into_iter().enumerate() {
        let sol = sol.map_err(|e| Error::numerical("geometry", "solve_jacobi", format!("ray {k}: {e}")))?;
        let th = k as f64 * dtheta;
        for (i, y) in sol.iter().enumerate() {
            let r = grid[i];
            let kk = profile.k(r, th);
            t.j.push(y[0]);
            t.dj.push(y[1]);
            t.d2j.push(-kk * y[0]);
            t.jt.push(y[2]);
            t.djt.push(y[3]);
            t.d2jt.push(-kk * y[2] - profile.dk_dtheta(r, th) * y[0]);
        }
    }
    Ok(JacobiField {
        profile: profile.clone(),
        grid,
        radial: None,
        rays: Some(t),
    })
}

#[inline]
fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1
}

#[inline]
fn hermite_slope(y0: f64, y1: f64, m0: f64, m1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * (y0 - y1) / h + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1
}

impl JacobiField {
    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().expect("grid is non-empty")
    }

    pub fn is_radial(&self) -> bool {
        self.radial.is_some()
    }

    /// Number of tabulated rays (0 for radial fields).
    pub fn n_rays(&self) -> usize {
        self.rays.as_ref().map_or(0, |t| t.n_rays)
    }

    /// Tabulated `(J, ∂rJ)` at grid node `i`, along ray `ray` for perturbed fields.
    pub fn node(&self, i: usize, ray: usize) -> (f64, f64) {
        match (&self.radial, &self.rays) {
            (Some(t), _) => (t.j[i], t.dj[i]),
            (None, Some(t)) => {
                let idx = ray * self.grid.len() + i;
                (t.j[idx], t.dj[idx])
            }
            _ => unreachable!("field has either a radial table or rays"),
        }
    }

    /// Tabulated `∂θJ` at node `i` on ray `ray` (0 for radial fields).
    pub fn node_dtheta(&self, i: usize, ray: usize) -> f64 {
        self.rays.as_ref().map_or(0.0, |t| t.jt[ray * self.grid.len() + i])
    }

    #[inline]
    fn cell(&self, r: f64) -> (usize, f64, f64) {
        let n = self.grid.len();
        let i = self.grid.partition_point(|&x| x <= r).clamp(1, n - 1) - 1;
        let h = self.grid[i + 1] - self.grid[i];
        (i, h, (r - self.grid[i]) / h)
    }

    /// `J`, `∂rJ`, `∂θJ` at `(r, θ)`. `theta` is ignored for radial fields.
    #[inline]
    pub fn local(&self, r: f64, theta: f64) -> Local {
        let (i, h, t) = self.cell(r);
        if let Some(tab) = &self.radial {
            return Local {
                j: hermite(tab.j[i], tab.j[i + 1], tab.dj[i], tab.dj[i + 1], h, t),
                dj_dr: hermite(tab.dj[i], tab.dj[i + 1], tab.d2j[i], tab.d2j[i + 1], h, t),
                dj_dtheta: 0.0,
            };
        }
        let tab = self.rays.as_ref().expect("field has either a radial table or rays");
        let n = self.grid.len();
        let u = theta.rem_euclid(TAU) / tab.dtheta;
        let k0 = (u.floor() as usize).min(tab.n_rays - 1);
        let s = (u - k0 as f64).clamp(0.0, 1.0);
        let k1 = (k0 + 1) % tab.n_rays;
        let ray = |k: usize| {
            let a = k * n + i;
            let b = a + 1;
            (
                hermite(tab.j[a], tab.j[b], tab.dj[a], tab.dj[b], h, t),
                hermite(tab.dj[a], tab.dj[b], tab.d2j[a], tab.d2j[b], h, t),
                hermite(tab.jt[a], tab.jt[b], tab.djt[a], tab.djt[b], h, t),
                hermite(tab.djt[a], tab.djt[b], tab.d2jt[a], tab.d2jt[b], h, t),
            )
        };
        let (j0, jr0, jt0, jrt0) = ray(k0);
        let (j1, jr1, jt1, jrt1) = ray(k1);
        let d = tab.dtheta;
        Local {
            j: hermite(j0, j1, jt0, jt1, d, s),
            dj_dr: hermite(jr0, jr1, jrt0, jrt1, d, s),
            dj_dtheta: hermite_slope(j0, j1, jt0, jt1, d, s),
        }
    }

    /// Radial `J(r)`; for perturbed fields the value on the ray θ = 0.
    #[inline]
    pub fn j(&self, r: f64) -> f64 {
        self.local(r, 0.0).j
    }

    #[inline]
    pub fn dj_dr(&self, r: f64) -> f64 {
        self.local(r, 0.0).dj_dr
    }

    /// Minimum of `J(r, ·)` over the tabulated rays at node `i`.
    pub fn min_over_rays(&self, i: usize) -> f64 {
        match &self.rays {
            None => self.node(i, 0).0,
            Some(t) => (0..t.n_rays).map(|k| t.j[k * self.grid.len() + i]).fold(f64::INFINITY, f64::min),
        }
    }

    /// Writes `r,J,dJdr` rows along the ray `theta` (ignored when radial).
    pub fn write_csv<W: Write>(&self, mut w: W, theta: f64) -> Result<()> {
        writeln!(w, "r,J,dJdr")?;
        for &r in &self.grid {
            let l = self.local(r, theta);
            writeln!(w, "{},{},{}", r, l.j, l.dj_dr)?;
        }
        Ok(())
    }
}
