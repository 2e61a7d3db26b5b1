//! Experiment configuration: a sectioned TOML file.
//!
//! The canonical form is the TOML serialization with keys sorted; its SHA-256
//! is the `config_hash` embedded in every report. The worker count is an
//! operational knob and is left out of the canonical form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dirichlet::{BoundaryFunction, DirichletSettings};
use crate::error::{Error, Result};
use crate::geometry::{CurvatureProfile, Envelope};
use crate::sde::{McConfig, Sector, StepPolicy, StopSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    #[default]
    Simulate,
    Coupled,
    Dirichlet,
    Dichotomy,
    Estimates,
    Validate,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Simulate => "simulate",
            ExperimentKind::Coupled => "coupled",
            ExperimentKind::Dirichlet => "dirichlet",
            ExperimentKind::Dichotomy => "dichotomy",
            ExperimentKind::Estimates => "estimates",
            ExperimentKind::Validate => "validate",
        }
    }
}

/// `[profile]`: `kind` is `constant`, `threshold` or `perturbed`; a perturbed
/// profile takes its base from `base` (`constant` or `threshold`) and the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<String>,
    pub r_max: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            kind: "constant".into(),
            kappa: Some(-1.0),
            c: None,
            cutoff: None,
            w: None,
            base: None,
            eta: None,
            mode: None,
            envelope: None,
            r_max: 50.0,
        }
    }
}

fn prefixed(e: Error, section: &str) -> Error {
    match e {
        Error::Config { key, msg } => Error::config(format!("{section}.{key}"), msg),
        other => other,
    }
}

impl ProfileConfig {
    fn radial(&self, kind: &str) -> Result<CurvatureProfile> {
        match kind {
            "constant" => CurvatureProfile::constant(self.kappa.ok_or_else(|| missing("kappa"))?, self.r_max),
            "threshold" => {
                let c = self.c.ok_or_else(|| missing("c"))?;
                let cutoff = self.cutoff.unwrap_or(std::f64::consts::E);
                CurvatureProfile::threshold(c, cutoff, self.w.unwrap_or(cutoff), self.r_max)
            }
            other => Err(Error::config("kind", format!("unknown radial profile kind `{other}`"))),
        }
    }

    pub fn build(&self) -> Result<CurvatureProfile> {
        let p = match self.kind.as_str() {
            "perturbed" => {
                let base = self.radial(self.base.as_deref().ok_or_else(|| missing("base"))?);
                let base = base.map_err(|e| match e {
                    Error::Config { key, msg } if key == "kind" => Error::config("base", msg),
                    other => other,
                })?;
                let envelope = Envelope::parse(self.envelope.as_deref().unwrap_or("one"))?;
                CurvatureProfile::perturbed(base, self.eta.ok_or_else(|| missing("eta"))?, self.mode.unwrap_or(1), envelope)
            }
            k => self.radial(k),
        };
        p.map_err(|e| prefixed(e, "profile"))
    }
}

fn missing(key: &str) -> Error {
    Error::config(key, "required for this profile kind")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartConfig {
    /// `[r₀, θ₀]` pairs.
    pub points: Vec<[f64; 2]>,
}

impl Default for StartConfig {
    fn default() -> Self {
        StartConfig {
            points: vec![[2.0, 0.0]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopConfig {
    pub r_inf: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_inner: Option<f64>,
    /// Sector half-width; the sector is centred on the start angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qv_max: Option<f64>,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Run to `2·r_inf` and report the drift from `r_inf`.
    #[serde(default = "yes")]
    pub doubled_proxy: bool,
}

fn default_t_max() -> f64 {
    1e6
}
fn default_max_steps() -> u64 {
    50_000_000
}
fn yes() -> bool {
    true
}

impl Default for StopConfig {
    fn default() -> Self {
        StopConfig {
            r_inf: 12.0,
            r_inner: None,
            beta: None,
            t_max: default_t_max(),
            qv_max: None,
            max_steps: default_max_steps(),
            doubled_proxy: true,
        }
    }
}

impl StopConfig {
    pub fn build(&self, theta0: f64) -> StopSpec {
        let mut s = StopSpec::to_radius(self.r_inf);
        s.r_inner = self.r_inner;
        s.sector = self.beta.map(|b| Sector {
            center: theta0,
            half_width: b,
        });
        s.t_max = self.t_max;
        s.qv_max = self.qv_max.unwrap_or(f64::INFINITY);
        s.max_steps = self.max_steps;
        if self.doubled_proxy {
            s = s.with_doubled_proxy();
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub n_paths: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
}

fn default_deltas() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            n_paths: 1000,
            seed: 0,
            workers: None,
            deltas: default_deltas(),
        }
    }
}

impl McSection {
    pub fn build(&self) -> McConfig {
        McConfig {
            n_paths: self.n_paths,
            seed: self.seed,
            workers: self.workers,
            deltas: self.deltas.clone(),
            stream_offset: 0,
        }
    }
}

/// `[policy]`; an absent bound is infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_drift: Option<f64>,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        let d = StepPolicy::default();
        PolicyConfig {
            dt_max: Some(d.dt_max),
            delta_r: Some(d.delta_r),
            c_drift: Some(d.c_drift),
        }
    }
}

impl PolicyConfig {
    pub fn build(&self) -> StepPolicy {
        StepPolicy {
            dt_max: self.dt_max.unwrap_or(f64::INFINITY),
            delta_r: self.delta_r.unwrap_or(f64::INFINITY),
            c_drift: self.c_drift.unwrap_or(f64::INFINITY),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub plot: bool,
    /// Per-path CSV dump.
    #[serde(default)]
    pub paths_csv: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletSection {
    #[serde(default = "default_boundary")]
    pub boundary: String,
    #[serde(default = "default_bins")]
    pub bins: usize,
    /// Radii for a boundary-continuity scan along `theta_hat`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default)]
    pub theta_hat: f64,
    #[serde(default = "default_r_inf_factor")]
    pub r_inf_factor: f64,
    #[serde(default = "default_bv_delta")]
    pub bv_delta: f64,
}

fn default_boundary() -> String {
    "cos:1".into()
}
fn default_bins() -> usize {
    32
}
fn default_r_inf_factor() -> f64 {
    10.0
}
fn default_bv_delta() -> f64 {
    0.05
}

impl Default for DirichletSection {
    fn default() -> Self {
        DirichletSection {
            boundary: default_boundary(),
            bins: default_bins(),
            radii: None,
            theta_hat: 0.0,
            r_inf_factor: default_r_inf_factor(),
            bv_delta: default_bv_delta(),
        }
    }
}

impl DirichletSection {
    pub fn boundary_function(&self) -> Result<BoundaryFunction> {
        BoundaryFunction::parse(&self.boundary).map_err(|e| prefixed(e, "dirichlet"))
    }

    pub fn settings(&self, stop: &StopConfig, policy: StepPolicy) -> DirichletSettings {
        DirichletSettings {
            r_inf: stop.r_inf,
            t_max: stop.t_max,
            policy,
            bv_delta: self.bv_delta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DichotomySection {
    #[serde(default = "default_cs")]
    pub cs: Vec<f64>,
    #[serde(default = "default_dich_r0")]
    pub r0: f64,
    #[serde(default = "default_dich_alpha")]
    pub alpha: f64,
    /// Time cap of the Monte Carlo runs; results are also read off at `t_max/2`.
    #[serde(default = "default_dich_t_max")]
    pub t_max: f64,
    /// Outer radius for transient profiles; recurrent ones run to `r_max`.
    #[serde(default = "default_dich_r_out")]
    pub r_out: f64,
}

fn default_cs() -> Vec<f64> {
    vec![0.5, 2.0]
}
fn default_dich_r0() -> f64 {
    50.0
}
fn default_dich_alpha() -> f64 {
    5.0
}
fn default_dich_t_max() -> f64 {
    4e6
}
fn default_dich_r_out() -> f64 {
    1e3
}

impl Default for DichotomySection {
    fn default() -> Self {
        DichotomySection {
            cs: default_cs(),
            r0: default_dich_r0(),
            alpha: default_dich_alpha(),
            t_max: default_dich_t_max(),
            r_out: default_dich_r_out(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatesSection {
    #[serde(default = "default_classify_cs")]
    pub classify_cs: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    /// Flattened `(a, b)` level pairs.
    #[serde(default = "default_levels")]
    pub green_levels: Vec<[f64; 2]>,
    #[serde(default = "default_qv_r0s")]
    pub qv_r0s: Vec<f64>,
    #[serde(default = "default_r_inf_factor")]
    pub qv_cap_factor: f64,
}

fn default_classify_cs() -> Vec<f64> {
    vec![0.5, 0.9, 1.1, 2.0]
}
fn default_eps() -> f64 {
    1.0
}
fn default_alphas() -> Vec<f64> {
    vec![10.0, 100.0]
}
fn default_betas() -> Vec<f64> {
    vec![0.5, 1.5]
}
fn default_levels() -> Vec<[f64; 2]> {
    vec![[0.2, 0.8], [0.1, 0.5], [0.3, 0.9]]
}
fn default_qv_r0s() -> Vec<f64> {
    vec![10.0, 100.0, 1000.0]
}

impl Default for EstimatesSection {
    fn default() -> Self {
        EstimatesSection {
            classify_cs: default_classify_cs(),
            eps: default_eps(),
            alphas: default_alphas(),
            betas: default_betas(),
            green_levels: default_levels(),
            qv_r0s: default_qv_r0s(),
            qv_cap_factor: default_r_inf_factor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledSection {
    /// Margin `ε` and cutoff `R` of the comparison hypothesis.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(rename = "R", default = "default_cutoff")]
    pub cutoff: f64,
    #[serde(default = "default_k_tol")]
    pub k_tol: f64,
    /// Coarsest step of the refinement study (0 disables it).
    #[serde(default = "default_refine_dt")]
    pub refine_dt: f64,
    #[serde(default = "default_refine_paths")]
    pub refine_paths: usize,
    #[serde(default = "default_refine_t")]
    pub refine_t_max: f64,
}

fn default_cutoff() -> f64 {
    std::f64::consts::E
}
fn default_k_tol() -> f64 {
    1.0
}
fn default_refine_dt() -> f64 {
    1e-2
}
fn default_refine_paths() -> usize {
    200
}
fn default_refine_t() -> f64 {
    2.0
}

impl Default for CoupledSection {
    fn default() -> Self {
        CoupledSection {
            eps: default_eps(),
            cutoff: default_cutoff(),
            k_tol: default_k_tol(),
            refine_dt: default_refine_dt(),
            refine_paths: default_refine_paths(),
            refine_t_max: default_refine_t(),
        }
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub kind: ExperimentKind,
    #[serde(default)]
    pub profile: ProfileConfig,
    #[serde(default)]
    pub start: StartConfig,
    #[serde(default)]
    pub stop: StopConfig,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub policy: PolicyConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub dirichlet: DirichletSection,
    #[serde(default)]
    pub dichotomy: DichotomySection,
    #[serde(default)]
    pub estimates: EstimatesSection,
    #[serde(default)]
    pub coupled: CoupledSection,
}

/// Best-effort extraction of the offending key from a TOML error.
fn toml_key(e: &toml::de::Error) -> String {
    let msg = e.message();
    if let Some(start) = msg.find('`') {
        if let Some(len) = msg[start + 1..].find('`') {
            return msg[start + 1..start + 1 + len].to_string();
        }
    }
    "config".into()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::config(toml_key(&e), e.message().trim().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Semantic checks beyond the schema.
    pub fn validate(&self) -> Result<()> {
        self.profile.build()?;
        if self.start.points.is_empty() {
            return Err(Error::config("start.points", "at least one start point is required"));
        }
        if self.mc.n_paths == 0 {
            return Err(Error::config("mc.n_paths", "at least one path is required"));
        }
        if self.mc.workers == Some(0) {
            return Err(Error::config("mc.workers", "worker count must be positive"));
        }
        self.policy.build().validate()?;
        self.dirichlet.boundary_function()?;
        Ok(())
    }

    /// Sorted-key TOML, without the worker count.
    pub fn canonical(&self) -> String {
        let mut c = self.clone();
        c.mc.workers = None;
        let value = toml::Value::try_from(&c).expect("config is always representable as TOML");
        toml::to_string(&value).expect("TOML values serialize")
    }

    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_toml(&self) -> String {
        let value = toml::Value::try_from(self).expect("config is always representable as TOML");
        toml::to_string(&value).expect("TOML values serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
kind = "dirichlet"
[profile]
kind = "perturbed"
base = "threshold"
c = 2.0
R = 1.1
w = 0.1
eta = 0.3
mode = 3
envelope = "ramp:1:3"
r_max = 2e4
[start]
points = [[10.0, 0.0], [100.0, 0.0]]
[stop]
r_inf = 100.0
[mc]
n_paths = 500
seed = 7
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.kind, ExperimentKind::Dirichlet);
        assert!(!c.profile.build().unwrap().is_radial());
        let again = ExperimentConfig::parse(&c.to_toml()).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.config_hash(), c.config_hash());
    }

    #[test]
    fn hash_ignores_workers_and_key_order() {
        let a = ExperimentConfig::parse(SAMPLE).unwrap();
        let mut b = a.clone();
        b.mc.workers = Some(3);
        assert_eq!(a.config_hash(), b.config_hash());
        b.mc.seed = 8;
        assert_ne!(a.config_hash(), b.config_hash());
        let reordered = SAMPLE.replace("n_paths = 500\nseed = 7", "seed = 7\nn_paths = 500");
        assert_eq!(ExperimentConfig::parse(&reordered).unwrap().config_hash(), a.config_hash());
    }

    #[test]
    fn bad_eta_names_key() {
        let text = SAMPLE.replace("eta = 0.3", "eta = 1.0");
        match ExperimentConfig::parse(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "profile.eta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_named() {
        let text = SAMPLE.replace("seed = 7", "seeed = 7");
        match ExperimentConfig::parse(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "seeed"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_config_is_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
    }
}
