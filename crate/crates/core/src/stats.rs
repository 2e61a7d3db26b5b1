//! Small statistics toolkit: binomial intervals, sample moments, KS distance.

use serde::Serialize;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A binomial proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub n: u64,
    pub p: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Proportion {
    pub fn new(successes: u64, n: u64) -> Self {
        let (lo, hi) = wilson(successes, n, Z95);
        let p = if n == 0 { f64::NAN } else { successes as f64 / n as f64 };
        Proportion { successes, n, p, lo, hi }
    }

    /// Plug-in standard error `sqrt(p(1-p)/n)`.
    pub fn se(&self) -> f64 {
        (self.p * (1.0 - self.p) / self.n as f64).sqrt()
    }

    /// True when the two intervals are disjoint.
    pub fn separated_from(&self, other: &Proportion) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Sample mean with the 95% half-width `1.96·s/√n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std: f64,
    pub n: u64,
    pub ci: f64,
}

impl MeanEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let (mean, std) = mean_std(xs);
        let n = xs.len() as u64;
        let ci = if n > 0 { Z95 * std / (n as f64).sqrt() } else { f64::NAN };
        MeanEstimate { mean, std, n, ci }
    }

    pub fn se(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

/// Mean and unbiased standard deviation (0 for a single sample).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1) as f64).sqrt())
}

/// Two-sided Kolmogorov–Smirnov distance between the samples and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Asymptotic 95% critical value of the one-sample KS distance.
pub fn ks_critical_95(n: usize) -> f64 {
    1.36 / (n as f64).sqrt()
}
