//! Harmonic measure of the hyperbolic plane seen from an interior point.
//!
//! In the disk model the point at distance `r₀` sits at Euclidean radius
//! `ρ = tanh(r₀/2)`, and the exit law is the Euclidean Poisson kernel.

use std::f64::consts::{PI, TAU};

/// `(1−ρ²)/(2π(1 − 2ρ cos(θ−θ₀) + ρ²))` with `ρ = tanh(r₀/2)`.
pub fn poisson_kernel_h2(r0: f64, theta0: f64, theta: f64) -> f64 {
    let rho = (r0 / 2.0).tanh();
    (1.0 - rho * rho) / (TAU * (1.0 - 2.0 * rho * (theta - theta0).cos() + rho * rho))
}

/// `∫_{-π}^{φ} P` extended to all of ℝ with unit jumps per turn.
fn kernel_antiderivative(rho: f64, phi: f64) -> f64 {
    let turns = (phi / TAU).round();
    let p = phi - turns * TAU;
    let k = (1.0 + rho) / (1.0 - rho);
    turns + 0.5 + ((k * (p / 2.0).tan()).atan()) / PI
}

/// CDF of the exit angle reduced to `[0, 2π)`, evaluated at `θ ∈ [0, 2π)`.
pub fn poisson_cdf_h2(r0: f64, theta0: f64, theta: f64) -> f64 {
    let rho = (r0 / 2.0).tanh();
    (kernel_antiderivative(rho, theta - theta0) - kernel_antiderivative(rho, -theta0)).clamp(0.0, 1.0)
}
