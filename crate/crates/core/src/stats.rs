use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// Runs discarded because they hit the safety jump budget.
    #[serde(default)]
    pub aborted: usize,
}

impl McEstimate {
    /// Plain sample mean and `sqrt(s² / n)` with the unbiased variance `s²`.
    ///
    /// Panics on an empty sample.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        assert!(n >= 1, "an estimate needs at least one sample");
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        McEstimate {
            mean,
            std_error,
            n_samples: n,
            aborted: 0,
        }
    }

    /// Number of standard errors separating the estimate from `exact`.
    ///
    /// Zero when both the error and the discrepancy vanish.
    pub fn z_score(&self, exact: f64) -> f64 {
        let diff = self.mean - exact;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    }

    /// `|mean - exact| <= k·SE`, with a tiny absolute slack for exact zeros.
    pub fn within(&self, exact: f64, k: f64) -> bool {
        (self.mean - exact).abs() <= k * self.std_error + 1e-12 * exact.abs().max(1e-300)
    }
}

/// Median and quartiles of a sample (linear interpolation between order statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}

impl Quartiles {
    pub fn of(samples: &[f64]) -> Self {
        let mut v = samples.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        Quartiles {
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
        }
    }
}

/// Standard error of the sample median by sectioning: the sample is cut, in
/// order, into `batches` equal batches and the spread of the batch medians
/// is scaled down by `sqrt(batches)`. Zero when there are too few samples.
pub fn median_std_error(samples: &[f64], batches: usize) -> f64 {
    let per = samples.len() / batches.max(1);
    if batches < 2 || per < 1 {
        return 0.0;
    }
    let medians: Vec<f64> = samples
        .chunks_exact(per)
        .take(batches)
        .map(|c| Quartiles::of(c).median)
        .collect();
    McEstimate::from_samples(&medians).std_error
}

/// Delta-method standard error of `a / b` for independent estimates.
pub fn ratio_std_error(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    let r = a / b;
    r.abs() * ((se_a / a).powi(2) + (se_b / b).powi(2)).sqrt()
}
