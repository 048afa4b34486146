use super::report::{EstimatorReport, Method};
use crate::binned::CumulativeCurve;
use crate::error::{Error, Result};

/// Piecewise-linear CDF through the cumulative nodes (uniform within bins).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCdf {
    taus: Vec<f64>,
    probs: Vec<f64>,
}

impl LinearCdf {
    pub fn new(curve: &CumulativeCurve) -> Result<Self> {
        if !curve.taus().iter().all(|t| t.is_finite()) {
            return Err(Error::NonFiniteSupport);
        }
        Ok(Self { taus: curve.taus().to_vec(), probs: curve.probs().to_vec() })
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= self.taus[0] {
            return 0.0;
        }
        let k = self.taus.partition_point(|&t| t <= tau);
        if k == self.taus.len() {
            return 1.0;
        }
        let (t0, t1) = (self.taus[k - 1], self.taus[k]);
        let (f0, f1) = (self.probs[k - 1], self.probs[k]);
        f0 + (f1 - f0) * (tau - t0) / (t1 - t0)
    }

    /// Piecewise-constant density; right-continuous at the nodes.
    pub fn pdf(&self, tau: f64) -> f64 {
        if tau < self.taus[0] {
            return 0.0;
        }
        let k = self.taus.partition_point(|&t| t <= tau);
        if k == self.taus.len() {
            return 0.0;
        }
        (self.probs[k] - self.probs[k - 1]) / (self.taus[k] - self.taus[k - 1])
    }

    /// Leftmost `τ` with `F(τ) ≥ q`, by exact linear inversion.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLevel(q));
        }
        let k = self.probs.partition_point(|&f| f < q);
        if k == 0 {
            return Ok(self.taus[0]);
        }
        let k = k.min(self.taus.len() - 1);
        let (f0, f1) = (self.probs[k - 1], self.probs[k]);
        let frac = ((q - f0) / (f1 - f0)).clamp(0.0, 1.0);
        Ok(self.taus[k - 1] + frac * (self.taus[k] - self.taus[k - 1]))
    }

    /// Exact moments of the piecewise-constant density.
    pub fn moments(&self) -> (f64, f64) {
        let segments = || {
            self.taus
                .windows(2)
                .zip(self.probs.windows(2))
                .map(|(t, f)| (f[1] - f[0], 0.5 * (t[0] + t[1]), t[1] - t[0]))
        };
        let mean: f64 = segments().map(|(p, mid, _)| p * mid).sum();
        let var: f64 = segments()
            .map(|(p, mid, w)| p * ((mid - mean).powi(2) + w * w / 12.0))
            .sum();
        (mean, var.sqrt())
    }
}

pub fn rcfp_estimator(curve: &CumulativeCurve, levels: &[f64]) -> Result<EstimatorReport> {
    let cdf = LinearCdf::new(curve)?;
    let (mean, sd) = cdf.moments();
    EstimatorReport::build(Method::Rcfp, levels, |q| cdf.quantile(q), mean, sd)
}
