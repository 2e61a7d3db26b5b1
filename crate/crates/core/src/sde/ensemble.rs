//! Ensembles of independent paths and their summary statistics.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::path::{run_path, PathRecord, PathState, StepPolicy, StopReason, StopSpec};
use crate::error::{Error, Result};
use crate::geometry::JacobiField;
use crate::parallel::with_workers;
use crate::stats::{MeanEstimate, Proportion};

/// Monte Carlo settings shared by every ensemble-based experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    pub seed: u64,
    /// `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Thresholds for the exceedance probabilities.
    pub deltas: Vec<f64>,
    /// Added to the path index to form the stream id.
    pub stream_offset: u64,
}

impl McConfig {
    pub fn new(n_paths: usize, seed: u64) -> Self {
        McConfig {
            n_paths,
            seed,
            workers: None,
            deltas: vec![0.05, 0.1, 0.2],
            stream_offset: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::config("mc.n_paths", "at least one path is required"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0)) {
            return Err(Error::config("mc.deltas", format!("thresholds must be positive, got {d}")));
        }
        Ok(())
    }
}

/// Empirical exceedance probability `P(X > δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Exceedance {
    pub delta: f64,
    pub prob: Proportion,
}

/// Statistics of an ensemble viewed at one infinity-proxy radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub r_inf: f64,
    pub stop_counts: BTreeMap<StopReason, u64>,
    /// Exit angles in `[0, 2π)` of the paths that reached `r_inf`, in path order.
    pub exit_angles: Vec<f64>,
    pub p_qv_exceed: Vec<Exceedance>,
    pub p_supdev_exceed: Vec<Exceedance>,
    pub p_supbv_exceed: Vec<Exceedance>,
    pub qv_mean: MeanEstimate,
}

impl EnsembleSummary {
    pub fn count(&self, reason: StopReason) -> u64 {
        self.stop_counts.get(&reason).copied().unwrap_or(0)
    }

    pub fn valid_paths(&self) -> u64 {
        self.stop_counts.values().sum::<u64>() - self.count(StopReason::NumericalFloor)
    }

    /// Fraction of all non-floored paths stopped for `reason`.
    pub fn frequency(&self, reason: StopReason) -> Proportion {
        Proportion::new(self.count(reason), self.valid_paths())
    }

    fn from_states<'a>(r_inf: f64, items: impl Iterator<Item = (StopReason, &'a PathState)>, deltas: &[f64]) -> Self {
        let mut stop_counts: BTreeMap<StopReason, u64> = StopReason::ALL.iter().map(|r| (*r, 0)).collect();
        let mut exit_angles = Vec::new();
        let mut states = Vec::new();
        for (reason, s) in items {
            *stop_counts.get_mut(&reason).expect("all reasons seeded") += 1;
            if reason == StopReason::NumericalFloor {
                continue;
            }
            if reason == StopReason::ReachedInfinityProxy {
                exit_angles.push(s.angle());
            }
            states.push(*s);
        }
        let n = states.len() as u64;
        let exceed = |f: &dyn Fn(&PathState) -> f64| -> Vec<Exceedance> {
            deltas
                .iter()
                .map(|&d| Exceedance {
                    delta: d,
                    prob: Proportion::new(states.iter().filter(|s| f(s) > d).count() as u64, n),
                })
                .collect()
        };
        let qvs: Vec<f64> = states.iter().map(|s| s.qv_theta).collect();
        EnsembleSummary {
            r_inf,
            p_qv_exceed: exceed(&|s| s.qv_theta),
            p_supdev_exceed: exceed(&|s| s.sup_dev),
            p_supbv_exceed: exceed(&|s| s.sup_bv),
            qv_mean: MeanEstimate::from_samples(&qvs),
            stop_counts,
            exit_angles,
        }
    }
}

/// Result of [`run_ensemble`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleReport {
    pub n_paths: usize,
    pub seed: u64,
    pub deltas: Vec<f64>,
    /// View at the outer stopping radius.
    pub outer: EnsembleSummary,
    /// View at the probe radius, when the stop spec has one.
    pub inner: Option<EnsembleSummary>,
    #[serde(skip)]
    pub records: Vec<PathRecord>,
}

impl EnsembleReport {
    /// The headline view: the probe radius when present, else the outer one.
    pub fn headline(&self) -> &EnsembleSummary {
        self.inner.as_ref().unwrap_or(&self.outer)
    }

    /// `outer − headline` for each `P(⟨θ⟩ > δ)`.
    pub fn qv_truncation_drift(&self) -> Vec<f64> {
        self.outer
            .p_qv_exceed
            .iter()
            .zip(&self.headline().p_qv_exceed)
            .map(|(o, h)| o.prob.p - h.prob.p)
            .collect()
    }
}

/// Simulates `mc.n_paths` paths; stream id of path `i` is `mc.stream_offset + i`.
pub fn run_ensemble(
    start: (f64, f64),
    jacobi: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    mc: &McConfig,
) -> Result<EnsembleReport> {
    mc.validate()?;
    stop.validate(start.0, jacobi)?;
    policy.validate()?;
    let records = simulate_records(start, jacobi, stop, policy, mc)?;
    Ok(summarize(records, stop, mc))
}

pub(crate) fn simulate_records(
    start: (f64, f64),
    jacobi: &JacobiField,
    stop: &StopSpec,
    policy: &StepPolicy,
    mc: &McConfig,
) -> Result<Vec<PathRecord>> {
    with_workers(mc.workers, || {
        (0..mc.n_paths as u64)
            .into_par_iter()
            .map(|i| run_path(start, jacobi, stop, policy, mc.seed, mc.stream_offset + i, None))
            .collect()
    })
}

pub(crate) fn summarize(records: Vec<PathRecord>, stop: &StopSpec, mc: &McConfig) -> EnsembleReport {
    let outer = EnsembleSummary::from_states(
        stop.r_inf,
        records.iter().map(|r| (r.stop_reason, &r.final_state)),
        &mc.deltas,
    );
    let inner = stop
        .r_probe
        .map(|p| EnsembleSummary::from_states(p, records.iter().map(|r| r.truncated()), &mc.deltas));
    EnsembleReport {
        n_paths: records.len(),
        seed: mc.seed,
        deltas: mc.deltas.clone(),
        outer,
        inner,
        records,
    }
}
