//! Brownian motion on two-dimensional Cartan–Hadamard surfaces.
//!
//! Surfaces are given by a Gauss-curvature profile in polar coordinates about a
//! pole; the metric is `ds² = dr² + J(r,θ)² dθ²` with `J` the Jacobi-field
//! length. On top of that the crate simulates the polar SDEs of Brownian
//! motion, estimates the harmonic extension of boundary data at infinity by
//! Monte Carlo, and provides deterministic oracles (scale functions, hitting
//! probabilities, Poisson kernel, energy integrals) to check the simulations.

pub mod cli;
pub mod config;
pub mod dirichlet;
pub mod error;
pub mod estimates;
pub mod geometry;
pub mod ode;
pub mod output;
pub mod parallel;
pub mod quadrature;
pub mod rng;
pub mod runner;
pub mod sde;
pub mod stats;
pub mod svg;
pub mod validate;

pub use error::{Error, Result};
