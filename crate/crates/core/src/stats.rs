//! Small descriptive-statistics helpers shared by the harness.

use serde::{Deserialize, Serialize};

/// Sample quantile by linear interpolation of order statistics (type 7).
/// `sorted` must be ascending and non-empty.
pub fn type7_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Mean and population standard deviation.
pub fn sample_moments(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn five_number(values: &[f64]) -> FiveNumber {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    FiveNumber {
        min: sorted[0],
        q1: type7_quantile(&sorted, 0.25),
        median: type7_quantile(&sorted, 0.5),
        q3: type7_quantile(&sorted, 0.75),
        max: *sorted.last().unwrap(),
    }
}
