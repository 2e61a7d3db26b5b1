use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial weight multiplying the angular modulation of a perturbed profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    /// Weight 1 everywhere.
    One,
    /// Raised-cosine ramp: 0 for `r <= start`, 1 for `r >= end`, C¹ in between.
    Ramp { start: f64, end: f64 },
}

impl Envelope {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Envelope::One => 1.0,
            Envelope::Ramp { start, end } => raised_cosine_step(r, start, end - start),
        }
    }

    /// Parses `"one"` or `"ramp:<start>:<end>"`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("one") || s.eq_ignore_ascii_case("constant") {
            return Ok(Envelope::One);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() == 3 && parts[0].eq_ignore_ascii_case("ramp") {
            let start: f64 = parts[1]
                .parse()
                .map_err(|_| Error::config("envelope", format!("bad ramp start in `{s}`")))?;
            let end: f64 = parts[2]
                .parse()
                .map_err(|_| Error::config("envelope", format!("bad ramp end in `{s}`")))?;
            if !(start >= 0.0 && end > start) {
                return Err(Error::config("envelope", "ramp requires 0 <= start < end"));
            }
            return Ok(Envelope::Ramp { start, end });
        }
        Err(Error::config("envelope", format!("unknown envelope `{s}` (expected `one` or `ramp:a:b`)")))
    }

    pub fn to_config_string(&self) -> String {
        match *self {
            Envelope::One => "one".to_string(),
            Envelope::Ramp { start, end } => format!("ramp:{start}:{end}"),
        }
    }
}

/// `0` below `start`, `1` above `start + width`, `(1 - cos(π s))/2` in between.
pub(crate) fn raised_cosine_step(r: f64, start: f64, width: f64) -> f64 {
    if r <= start {
        0.0
    } else if r >= start + width {
        1.0
    } else {
        0.5 * (1.0 - (PI * (r - start) / width).cos())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `K ≡ kappa`, `kappa <= 0`.
    Constant { kappa: f64 },
    /// `K = 0` for `r <= cutoff`, `K = -c/(r² log r)` for `r >= cutoff + width`,
    /// raised-cosine blend in between.
    Threshold { c: f64, cutoff: f64, width: f64 },
    /// The sharp-corner limit of `Threshold` (`width = 0`): the extremal profile
    /// used to certify Jacobi lower bounds.
    Ceiling { c: f64, cutoff: f64 },
    /// `K(r,θ) = K_base(r)·(1 + eta·cos(mode·θ)·envelope(r))`.
    Perturbed {
        base: Box<CurvatureProfile>,
        eta: f64,
        mode: u32,
        envelope: Envelope,
    },
    /// Radial `K(r) = K_base(r)·(1 + scale·envelope(r))`; produced as the
    /// angular maximum of a perturbed profile.
    Modulated {
        base: Box<CurvatureProfile>,
        scale: f64,
        envelope: Envelope,
    },
}

/// A Gauss-curvature profile in polar coordinates about a pole.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    pub kind: ProfileKind,
    pub r_max: f64,
}

/// Result of [`CurvatureProfile::eval_curvature`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureValue {
    pub value: f64,
    /// Set when an angle was supplied for a radial profile and ignored.
    pub theta_ignored: bool,
}

impl CurvatureProfile {
    pub fn constant(kappa: f64, r_max: f64) -> Result<Self> {
        let p = CurvatureProfile {
            kind: ProfileKind::Constant { kappa },
            r_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn threshold(c: f64, cutoff: f64, width: f64, r_max: f64) -> Result<Self> {
        let p = CurvatureProfile {
            kind: ProfileKind::Threshold { c, cutoff, width },
            r_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// Threshold family with the default cutoff `R = e` and blend width `w = R`.
    pub fn threshold_default(c: f64, r_max: f64) -> Result<Self> {
        Self::threshold(c, E, E, r_max)
    }

    pub fn ceiling(c: f64, cutoff: f64, r_max: f64) -> Result<Self> {
        let p = CurvatureProfile {
            kind: ProfileKind::Ceiling { c, cutoff },
            r_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn perturbed(base: CurvatureProfile, eta: f64, mode: u32, envelope: Envelope) -> Result<Self> {
        let r_max = base.r_max;
        let p = CurvatureProfile {
            kind: ProfileKind::Perturbed {
                base: Box::new(base),
                eta,
                mode,
                envelope,
            },
            r_max,
        };
        p.validate()?;
        Ok(p)
    }

    /// Same profile with a different maximum radius.
    pub fn with_r_max(&self, r_max: f64) -> Self {
        let mut p = self.clone();
        p.r_max = r_max;
        match &mut p.kind {
            ProfileKind::Perturbed { base, .. } | ProfileKind::Modulated { base, .. } => {
                **base = base.with_r_max(r_max);
            }
            _ => {}
        }
        p
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self.kind, ProfileKind::Perturbed { .. })
    }

    /// Checks parameter ranges; errors name the config key at fault.
    pub fn validate(&self) -> Result<()> {
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(Error::config("r_max", format!("must be positive and finite, got {}", self.r_max)));
        }
        match &self.kind {
            ProfileKind::Constant { kappa } => {
                if !(kappa.is_finite() && *kappa <= 0.0) {
                    return Err(Error::config("kappa", format!("curvature must be <= 0, got {kappa}")));
                }
            }
            ProfileKind::Threshold { c, cutoff, width } => {
                check_threshold(*c, *cutoff)?;
                if !(width.is_finite() && *width > 0.0) {
                    return Err(Error::config("w", format!("blend width must be positive, got {width}")));
                }
            }
            ProfileKind::Ceiling { c, cutoff } => check_threshold(*c, *cutoff)?,
            ProfileKind::Perturbed {
                base,
                eta,
                mode,
                envelope,
            } => {
                if !base.is_radial() {
                    return Err(Error::config("base", "perturbed base profile must be radial"));
                }
                base.validate()?;
                if !(eta.is_finite() && *eta >= 0.0 && *eta < 1.0) {
                    return Err(Error::config("eta", format!("modulation amplitude must lie in [0, 1), got {eta}")));
                }
                if *mode == 0 {
                    return Err(Error::config("mode", "angular mode must be a positive integer"));
                }
                check_envelope(envelope)?;
            }
            ProfileKind::Modulated { base, scale, envelope } => {
                base.validate()?;
                if !(scale.is_finite() && *scale > -1.0 && *scale < 1.0) {
                    return Err(Error::config("eta", format!("modulation scale must lie in (-1, 1), got {scale}")));
                }
                check_envelope(envelope)?;
            }
        }
        Ok(())
    }

    /// Curvature at `(r, θ)`. Radial profiles ignore `theta`. No range checks.
    #[inline]
    pub fn k(&self, r: f64, theta: f64) -> f64 {
        match &self.kind {
            ProfileKind::Constant { kappa } => *kappa,
            ProfileKind::Threshold { c, cutoff, width } => {
                if r <= *cutoff {
                    0.0
                } else {
                    -c / (r * r * r.ln()) * raised_cosine_step(r, *cutoff, *width)
                }
            }
            ProfileKind::Ceiling { c, cutoff } => {
                // right-continuous at the jump so a solve restarted at `cutoff` sees the curved side
                if r < *cutoff {
                    0.0
                } else {
                    -c / (r * r * r.ln())
                }
            }
            ProfileKind::Perturbed {
                base,
                eta,
                mode,
                envelope,
            } => base.k(r, 0.0) * (1.0 + eta * (*mode as f64 * theta).cos() * envelope.eval(r)),
            ProfileKind::Modulated { base, scale, envelope } => base.k(r, 0.0) * (1.0 + scale * envelope.eval(r)),
        }
    }

    /// `∂K/∂θ`; zero for radial profiles.
    #[inline]
    pub fn dk_dtheta(&self, r: f64, theta: f64) -> f64 {
        match &self.kind {
            ProfileKind::Perturbed {
                base,
                eta,
                mode,
                envelope,
            } => {
                let m = *mode as f64;
                -base.k(r, 0.0) * eta * m * (m * theta).sin() * envelope.eval(r)
            }
            _ => 0.0,
        }
    }

    /// Checked curvature evaluation.
    pub fn eval_curvature(&self, r: f64, theta: Option<f64>) -> Result<CurvatureValue> {
        if !(r >= 0.0 && r <= self.r_max) {
            return Err(Error::domain(
                "eval_curvature",
                format!("radius {r} outside [0, {}]", self.r_max),
            ));
        }
        match (self.is_radial(), theta) {
            (true, t) => Ok(CurvatureValue {
                value: self.k(r, 0.0),
                theta_ignored: t.is_some(),
            }),
            (false, Some(t)) => Ok(CurvatureValue {
                value: self.k(r, t),
                theta_ignored: false,
            }),
            (false, None) => Err(Error::domain("eval_curvature", "perturbed profile needs an angle")),
        }
    }

    /// Radii where the profile has a kink or a jump; used as grid nodes.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.kind {
            ProfileKind::Constant { .. } => vec![],
            ProfileKind::Threshold { cutoff, width, .. } => vec![*cutoff, cutoff + width],
            ProfileKind::Ceiling { cutoff, .. } => vec![*cutoff],
            ProfileKind::Perturbed { base, envelope, .. } | ProfileKind::Modulated { base, envelope, .. } => {
                let mut b = base.breakpoints();
                if let Envelope::Ramp { start, end } = envelope {
                    b.push(*start);
                    b.push(*end);
                }
                b
            }
        };
        out.retain(|&r| r > 0.0 && r < self.r_max);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Characteristic length of the curvature, used to cap tabulation steps.
    pub(crate) fn length_scale(&self) -> f64 {
        match &self.kind {
            ProfileKind::Constant { kappa } if *kappa < 0.0 => 1.0 / (-kappa).sqrt(),
            ProfileKind::Perturbed { base, eta, .. } => base.length_scale() / (1.0 + eta).sqrt(),
            ProfileKind::Modulated { base, .. } => base.length_scale(),
            _ => f64::INFINITY,
        }
    }

    /// Angular mode of a perturbed profile, or 0.
    pub fn mode(&self) -> u32 {
        match &self.kind {
            ProfileKind::Perturbed { mode, .. } => *mode,
            _ => 0,
        }
    }
}

fn check_threshold(c: f64, cutoff: f64) -> Result<()> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::config("c", format!("coefficient must be positive, got {c}")));
    }
    if !(cutoff.is_finite() && cutoff > 1.0) {
        return Err(Error::config("R", format!("cutoff radius must exceed 1, got {cutoff}")));
    }
    Ok(())
}

fn check_envelope(envelope: &Envelope) -> Result<()> {
    if let Envelope::Ramp { start, end } = envelope {
        if !(*start >= 0.0 && end > start) {
            return Err(Error::config("envelope", "ramp requires 0 <= start < end"));
        }
    }
    Ok(())
}
