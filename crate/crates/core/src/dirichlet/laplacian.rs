//! Finite-difference Laplace–Beltrami operator for `ds² = dr² + J²dθ²`:
//! `Δu = u_rr + (∂rJ/J) u_r + u_θθ/J² − (∂θJ/J³) u_θ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::JacobiField;

/// Values on a tensor grid, `values[i * theta.len() + j] = u(r[i], θ[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarGrid {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl PolarGrid {
    pub fn from_fn<F: Fn(f64, f64) -> f64>(r: Vec<f64>, theta: Vec<f64>, f: F) -> Self {
        let values = r.iter().flat_map(|&ri| theta.iter().map(move |&t| (ri, t))).map(|(a, b)| f(a, b)).collect();
        PolarGrid { r, theta, values }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.theta.len() + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn uniform_step(xs: &[f64], key: &str) -> Result<f64> {
    if xs.len() < 5 {
        return Err(Error::config(key, format!("need at least 5 nodes, got {}", xs.len())));
    }
    let h = xs[1] - xs[0];
    if !(h > 0.0) || xs.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::config(key, "nodes must be uniformly spaced and increasing"));
    }
    Ok(h)
}

/// Centered second-order Laplacian on the interior nodes.
pub fn laplacian_apply(u: &PolarGrid, jacobi: &JacobiField) -> Result<PolarGrid> {
    let hr = uniform_step(&u.r, "grid.r")?;
    let ht = uniform_step(&u.theta, "grid.theta")?;
    if u.values.len() != u.r.len() * u.theta.len() {
        return Err(Error::config("grid.values", "value count does not match the grid"));
    }
    if !(u.r[0] > 0.0 && *u.r.last().expect("checked length") <= jacobi.r_max()) {
        return Err(Error::domain("laplacian_apply", "radial nodes must lie in (0, r_max]"));
    }
    let (nr, nt) = (u.r.len(), u.theta.len());
    let mut values = Vec::with_capacity((nr - 2) * (nt - 2));
    for i in 1..nr - 1 {
        for j in 1..nt - 1 {
            let l = jacobi.local(u.r[i], u.theta[j]);
            let c = u.at(i, j);
            let u_rr = (u.at(i + 1, j) - 2.0 * c + u.at(i - 1, j)) / (hr * hr);
            let u_r = (u.at(i + 1, j) - u.at(i - 1, j)) / (2.0 * hr);
            let u_tt = (u.at(i, j + 1) - 2.0 * c + u.at(i, j - 1)) / (ht * ht);
            let u_t = (u.at(i, j + 1) - u.at(i, j - 1)) / (2.0 * ht);
            let inv_j = 1.0 / l.j;
            values.push(u_rr + l.dj_dr * inv_j * u_r + u_tt * inv_j * inv_j - l.dj_dtheta * inv_j.powi(3) * u_t);
        }
    }
    Ok(PolarGrid {
        r: u.r[1..nr - 1].to_vec(),
        theta: u.theta[1..nt - 1].to_vec(),
        values,
    })
}

/// Sum of absolute stencil weights at node `(i, j)`: propagates pointwise
/// errors of size `ε` to at most `weight·ε` in `Δu`.
pub fn stencil_weight(u: &PolarGrid, jacobi: &JacobiField, i: usize, j: usize) -> f64 {
    let hr = u.r[1] - u.r[0];
    let ht = u.theta[1] - u.theta[0];
    let l = jacobi.local(u.r[i], u.theta[j]);
    let a = l.dj_dr / l.j / (2.0 * hr);
    let b = 1.0 / (l.j * l.j * ht * ht);
    let c = l.dj_dtheta / l.j.powi(3) / (2.0 * ht);
    let rr = 1.0 / (hr * hr);
    (rr + a).abs() + (rr - a).abs() + 2.0 * rr + 2.0 * b + (b + c).abs() + (b - c).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{solve_jacobi, CurvatureProfile};

    fn lin(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constants_are_harmonic() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 10.0).unwrap()).unwrap();
        let u = PolarGrid::from_fn(lin(1.0, 2.0, 7), lin(0.0, 1.0, 7), |_, _| 3.0);
        assert!(laplacian_apply(&u, &jf).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn flat_r_squared() {
        let jf = solve_jacobi(&CurvatureProfile::constant(0.0, 10.0).unwrap()).unwrap();
        let u = PolarGrid::from_fn(lin(1.0, 3.0, 9), lin(0.0, 1.0, 5), |r, _| r * r);
        let d = laplacian_apply(&u, &jf).unwrap();
        assert!(d.values.iter().all(|v| (v - 4.0).abs() < 1e-8));
    }

    #[test]
    fn hyperbolic_cos_extension_second_order() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 10.0).unwrap()).unwrap();
        let f = |r: f64, t: f64| (r / 2.0).tanh() * t.cos();
        let err = |n: usize| {
            let u = PolarGrid::from_fn(lin(1.0, 2.0, n), lin(0.2, 1.2, n), f);
            laplacian_apply(&u, &jf).unwrap().max_abs()
        };
        let (e1, e2) = (err(9), err(17));
        assert!(e1 < 1e-2);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn coarse_grid_rejected() {
        let jf = solve_jacobi(&CurvatureProfile::constant(-1.0, 10.0).unwrap()).unwrap();
        let u = PolarGrid::from_fn(lin(1.0, 2.0, 4), lin(0.0, 1.0, 7), |_, _| 0.0);
        assert!(matches!(laplacian_apply(&u, &jf), Err(Error::Config { key, .. }) if key == "grid.r"));
    }
}
