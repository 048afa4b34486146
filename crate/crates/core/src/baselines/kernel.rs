//! Gaussian kernel CDF over the midpoint pseudo-sample.
//!
//! Each bin midpoint stands in for the observations of its bin, so the
//! estimate is `F̂(τ) = Σ_j (η_j / n) Φ((τ − ME_j)/h)`. That equals the
//! textbook sum over a pseudo-sample with every midpoint repeated `η_j`
//! times. Tables without counts are scaled to a nominal `n`.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::heuristic::midpoints;
use super::report::{EstimatorReport, Method, ReportMeta};
use crate::binned::BinnedTable;
use crate::error::{Error, Result};

pub const DEFAULT_NOMINAL_N: f64 = 1000.0;

/// Bracket half-width for quantile search, in bandwidths.
const SEARCH_SPAN: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Fixed bandwidth; Silverman's rule when absent.
    pub bandwidth: Option<f64>,
    /// Pseudo-sample size for tables given as relative frequencies.
    pub nominal_n: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { bandwidth: None, nominal_n: DEFAULT_NOMINAL_N }
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Fitted kernel CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCdf {
    centers: Vec<f64>,
    counts: Vec<f64>,
    n: f64,
    bandwidth: f64,
    fallback: bool,
    range: (f64, f64),
}

/// Silverman's rule `0.9 · min(s, IQR/1.34) · n^{−1/5}` on a weighted sample.
///
/// `s` uses the `n − 1` divisor and the IQR uses linearly interpolated
/// order statistics of the expanded sample. Returns `None` when the sample
/// has no spread.
pub fn silverman_bandwidth(centers: &[f64], counts: &[f64]) -> Option<f64> {
    let n: f64 = counts.iter().sum();
    if n <= 1.0 {
        return None;
    }
    let mean = centers.iter().zip(counts).map(|(x, c)| x * c).sum::<f64>() / n;
    let ss: f64 = centers.iter().zip(counts).map(|(x, c)| c * (x - mean).powi(2)).sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if !(sd > 0.0) {
        return None;
    }
    let iqr = expanded_quantile(centers, counts, 0.75) - expanded_quantile(centers, counts, 0.25);
    let spread = match sd.min(iqr / 1.34) {
        s if s > 0.0 => s,
        _ => sd,
    };
    Some(0.9 * spread * n.powf(-0.2))
}

/// Order statistic at 0-based (possibly fractional) index of the expanded
/// sample, centers assumed sorted.
fn expanded_at(centers: &[f64], counts: &[f64], index: f64) -> f64 {
    let mut acc = 0.0;
    for (x, c) in centers.iter().zip(counts) {
        acc += c;
        if acc > index {
            return *x;
        }
    }
    *centers.last().unwrap()
}

fn expanded_quantile(centers: &[f64], counts: &[f64], q: f64) -> f64 {
    let n: f64 = counts.iter().sum();
    let pos = (n - 1.0) * q;
    let lo = pos.floor();
    let frac = pos - lo;
    let a = expanded_at(centers, counts, lo);
    if frac == 0.0 {
        return a;
    }
    let b = expanded_at(centers, counts, lo + 1.0);
    a + frac * (b - a)
}

impl KernelCdf {
    pub fn new(table: &BinnedTable, options: KernelOptions) -> Result<Self> {
        if table.is_open_ended() {
            return Err(Error::OpenEnded("kernel estimator needs a finite upper limit".into()));
        }
        if let Some(h) = options.bandwidth {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")));
            }
        }
        let scale = match table.n() {
            Some(_) => 1.0,
            None => {
                if !(options.nominal_n > 1.0) {
                    return Err(Error::InvalidParameter("nominal n must exceed 1".into()));
                }
                options.nominal_n / table.total()
            }
        };
        let mids = midpoints(table);
        let widths: Vec<f64> = table.edges().windows(2).map(|w| w[1] - w[0]).collect();
        let mut centers = Vec::new();
        let mut counts = Vec::new();
        let mut occupied_width = 0.0;
        for ((&x, &w), &width) in mids.iter().zip(table.weights()).zip(&widths) {
            if w > 0.0 {
                centers.push(x);
                counts.push(w * scale);
                occupied_width = width;
            }
        }
        let n: f64 = counts.iter().sum();
        let (bandwidth, fallback) = match options.bandwidth {
            Some(h) => (h, false),
            None => match silverman_bandwidth(&centers, &counts) {
                Some(h) => (h, false),
                // all mass in one bin
                None => (occupied_width / 4.0, true),
            },
        };
        Ok(Self { centers, counts, n, bandwidth, fallback, range: (table.lower(), table.upper()) })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Whether the degenerate-sample fallback bandwidth was used.
    pub fn used_fallback(&self) -> bool {
        self.fallback
    }

    /// Pseudo-sample size.
    pub fn n(&self) -> f64 {
        self.n
    }

    /// Distinct pseudo-sample values and their multiplicities.
    pub fn pseudo_sample(&self) -> (&[f64], &[f64]) {
        (&self.centers, &self.counts)
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        let sum: f64 = self
            .centers
            .iter()
            .zip(&self.counts)
            .map(|(x, c)| c * std_normal_cdf((tau - x) / self.bandwidth))
            .sum();
        (sum / self.n).clamp(0.0, 1.0)
    }

    pub fn pdf(&self, tau: f64) -> f64 {
        let norm = (2.0 * std::f64::consts::PI).sqrt() * self.bandwidth * self.n;
        self.centers
            .iter()
            .zip(&self.counts)
            .map(|(x, c)| c * (-0.5 * ((tau - x) / self.bandwidth).powi(2)).exp())
            .sum::<f64>()
            / norm
    }

    /// Smallest `τ` with `F̂(τ) ≥ q`, by bisection, clamped to the table
    /// range `[τ_0, τ_r]`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLevel(q));
        }
        let (lo_edge, hi_edge) = self.range;
        if q == 0.0 {
            return Ok(lo_edge);
        }
        if q == 1.0 {
            return Ok(hi_edge);
        }
        let mut lo = self.centers[0] - SEARCH_SPAN * self.bandwidth;
        let mut hi = *self.centers.last().unwrap() + SEARCH_SPAN * self.bandwidth;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) >= q {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi.clamp(lo_edge, hi_edge))
    }

    pub fn moments(&self) -> (f64, f64) {
        let mean = self.centers.iter().zip(&self.counts).map(|(x, c)| x * c).sum::<f64>() / self.n;
        let var = self
            .centers
            .iter()
            .zip(&self.counts)
            .map(|(x, c)| c * (x - mean).powi(2))
            .sum::<f64>()
            / self.n;
        (mean, (var + self.bandwidth * self.bandwidth).sqrt())
    }
}

pub fn kernel_estimator(
    table: &BinnedTable,
    levels: &[f64],
    options: KernelOptions,
) -> Result<EstimatorReport> {
    let kernel = KernelCdf::new(table, options)?;
    let (mean, sd) = kernel.moments();
    let mut report = EstimatorReport::build(Method::Kernel, levels, |q| kernel.quantile(q), mean, sd)?;
    report.meta = ReportMeta {
        bandwidth: Some(kernel.bandwidth()),
        nominal_n: Some(kernel.n()),
        bandwidth_fallback: Some(kernel.used_fallback()),
        tail: None,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binned::{validate_table, RawTable};

    fn table() -> BinnedTable {
        validate_table(RawTable::counts(vec![0.0, 1.0, 2.0, 4.0, 7.0], vec![3.0, 9.0, 5.0, 2.0])).unwrap()
    }

    #[test]
    fn upper_limit_of_cdf() {
        let k = KernelCdf::new(&table(), KernelOptions::default()).unwrap();
        assert!(k.cdf(7.0 + 20.0 * k.bandwidth()) >= 1.0 - 1e-9);
        assert!(k.cdf(-20.0 * k.bandwidth()) <= 1e-9);
    }

    #[test]
    fn quantiles_stay_in_table_range() {
        let k = KernelCdf::new(&table(), KernelOptions::default()).unwrap();
        assert_eq!(k.quantile(0.0).unwrap(), 0.0);
        assert_eq!(k.quantile(1.0).unwrap(), 7.0);
        assert_eq!(k.quantile(1e-6).unwrap(), 0.0);
        let q = k.quantile(0.5).unwrap();
        assert!((k.cdf(q) - 0.5).abs() < 1e-9);
    }

    #[test]
    fn brute_force_pseudo_sample() {
        let t = table();
        let k = KernelCdf::new(&t, KernelOptions::default()).unwrap();
        let mut sample = Vec::new();
        for (x, &c) in midpoints(&t).iter().zip(t.weights()) {
            for _ in 0..c as usize {
                sample.push(*x);
            }
        }
        let h = k.bandwidth();
        for i in 0..200 {
            let tau = -2.0 + 11.0 * i as f64 / 199.0;
            let mut acc = 0.0;
            for x in &sample {
                acc += 0.5 * erfc(-((tau - x) / h) / std::f64::consts::SQRT_2);
            }
            assert!((k.cdf(tau) - acc / sample.len() as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn silverman_matches_hand_computation() {
        let t = table();
        let k = KernelCdf::new(&t, KernelOptions::default()).unwrap();
        // pseudo-sample: 0.5 x3, 1.5 x9, 3 x5, 5.5 x2 ; n = 19
        let xs: Vec<f64> = [(0.5, 3), (1.5, 9), (3.0, 5), (5.5, 2)]
            .iter()
            .flat_map(|&(x, c)| std::iter::repeat_n(x, c))
            .collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        // type-7: positions 4.5 and 13.5 of 0..18
        let q1 = xs[4] + 0.5 * (xs[5] - xs[4]);
        let q3 = xs[13] + 0.5 * (xs[14] - xs[13]);
        let h = 0.9 * sd.min((q3 - q1) / 1.34) * n.powf(-0.2);
        assert!((k.bandwidth() - h).abs() < 1e-14);
    }

    #[test]
    fn symmetric_table_keeps_mean() {
        let t = validate_table(RawTable::counts(vec![0.0, 2.0, 4.0], vec![10.0, 10.0])).unwrap();
        let r = kernel_estimator(&t, &[0.5], KernelOptions::default()).unwrap();
        assert!((r.mean - 2.0).abs() < 1e-15);
        assert!((r.quantiles[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_sample_falls_back() {
        let t = validate_table(RawTable::counts(vec![0.0, 2.0, 4.0], vec![0.0, 10.0])).unwrap();
        let k = KernelCdf::new(&t, KernelOptions::default()).unwrap();
        assert!(k.used_fallback());
        assert_eq!(k.bandwidth(), 0.5);
    }

    #[test]
    fn bad_bandwidth_rejected() {
        let opts = KernelOptions { bandwidth: Some(0.0), ..Default::default() };
        assert!(KernelCdf::new(&table(), opts).is_err());
    }

    #[test]
    fn proportions_scale_to_nominal_n() {
        let t = validate_table(RawTable::percent(vec![0.0, 6.0, 16.0, 180.0], vec![80.9, 11.3, 7.8])).unwrap();
        let k = KernelCdf::new(&t, KernelOptions::default()).unwrap();
        assert!((k.n() - 1000.0).abs() < 1e-9);
        let (mean, sd) = k.moments();
        assert!((mean - 11.314).abs() < 1e-9);
        assert!(sd > k.bandwidth());
    }
}
