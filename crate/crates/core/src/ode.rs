//! Dormand–Prince 5(4) integrator with step-size control.
//!
//! Used for the Jacobi equation along rays. Integration proceeds node to node
//! over a caller-supplied grid so that the solution is sampled exactly at the
//! tabulation points.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// error coefficients: 5th-order minus embedded 4th-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct OdeOpts {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOpts {
    fn default() -> Self {
        OdeOpts {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            min_step: 1e-14,
            max_steps: 5_000_000,
        }
    }
}

/// Integrates `y' = f(x, y)` from `grid[0]` through every grid node, returning
/// the state at each node. `N` is the system dimension.
pub fn solve_on_grid<const N: usize, F>(f: F, y0: [f64; N], grid: &[f64], opts: OdeOpts) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);
    if grid.len() < 2 {
        return Ok(out);
    }
    let mut y = y0;
    let mut x = grid[0];
    let mut h = (grid[1] - grid[0]).min(1e-3 * (1.0 + grid[1].abs()));
    let mut k1;
    let mut steps = 0usize;

    for &target in &grid[1..] {
        // fresh slope at each node: profiles may jump at breakpoints, which are nodes
        k1 = f(x, &y);
        while x < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::numerical("ode", "solve_on_grid", format!("step budget exhausted at x = {x}")));
            }
            let last = h >= target - x;
            let hh = if last { target - x } else { h };

            let mut tmp = [0.0; N];
            for i in 0..N {
                tmp[i] = y[i] + hh * A21 * k1[i];
            }
            let k2 = f(x + C2 * hh, &tmp);
            for i in 0..N {
                tmp[i] = y[i] + hh * (A31 * k1[i] + A32 * k2[i]);
            }
            let k3 = f(x + C3 * hh, &tmp);
            for i in 0..N {
                tmp[i] = y[i] + hh * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            let k4 = f(x + C4 * hh, &tmp);
            for i in 0..N {
                tmp[i] = y[i] + hh * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            let k5 = f(x + C5 * hh, &tmp);
            for i in 0..N {
                tmp[i] = y[i] + hh * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let k6 = f(x + hh, &tmp);
            let mut ynew = [0.0; N];
            for i in 0..N {
                ynew[i] = y[i] + hh * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            let x_new = if last { target } else { x + hh };
            let k7 = f(x_new, &ynew);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.abs_tol + opts.rel_tol * y[i].abs().max(ynew[i].abs());
                let ratio = (e / sc).abs();
                // f64::max drops NaN, so route it to an explicit rejection
                err = if ratio.is_nan() { f64::INFINITY } else { err.max(ratio) };
            }
            if !ynew.iter().all(|v| v.is_finite()) {
                err = f64::INFINITY;
            }

            if err <= 1.0 {
                x = x_new;
                y = ynew;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    h = hh * fac;
                } else {
                    h = h.max(hh * fac.min(1.0));
                }
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h = hh * fac;
                if h < opts.min_step * (1.0 + x.abs()) {
                    return Err(Error::numerical(
                        "ode",
                        "solve_on_grid",
                        format!("step size {h:e} below minimum at x = {x} (error ratio {err:e})"),
                    ));
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let sol = solve_on_grid(|_, y: &[f64; 2]| [y[1], -y[0]], [0.0, 1.0], &grid, OdeOpts::default()).unwrap();
        for (x, y) in grid.iter().zip(&sol) {
            assert!((y[0] - x.sin()).abs() < 1e-8);
            assert!((y[1] - x.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn exponential_growth_relative_accuracy() {
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.5).collect();
        let sol = solve_on_grid(|_, y: &[f64; 1]| [y[0]], [1.0], &grid, OdeOpts::default()).unwrap();
        for (x, y) in grid.iter().zip(&sol) {
            assert!(((y[0] - x.exp()) / x.exp()).abs() < 1e-8);
        }
    }

    #[test]
    fn step_rejection_reports_failure() {
        // y' = y^2 blows up at x = 1
        let grid = [0.0, 0.5, 2.0];
        let r = solve_on_grid(|_, y: &[f64; 1]| [y[0] * y[0]], [1.0], &grid, OdeOpts::default());
        assert!(r.is_err());
    }
}
