use super::report::{EstimatorReport, Method};
use crate::binned::BinnedTable;
use crate::error::{Error, Result};

/// Step CDF of binned data: each bin's mass sits on its upper edge.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedEcdf {
    edges: Vec<f64>,
    cum: Vec<f64>,
}

impl BinnedEcdf {
    pub fn new(table: &BinnedTable) -> Result<Self> {
        if table.is_open_ended() {
            return Err(Error::OpenEnded("eCDF needs a finite upper limit".into()));
        }
        Ok(Self { edges: table.edges().to_vec(), cum: table.cumulative() })
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        let k = self.edges.partition_point(|&e| e <= tau);
        if k == 0 {
            0.0
        } else {
            self.cum[k - 1]
        }
    }

    /// Smallest edge with `F(τ_j) ≥ q`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLevel(q));
        }
        let k = self.cum.partition_point(|&f| f < q);
        Ok(self.edges[k.min(self.edges.len() - 1)])
    }

    pub fn moments(&self) -> (f64, f64) {
        let masses: Vec<f64> = self.cum.windows(2).map(|w| w[1] - w[0]).collect();
        let uppers = &self.edges[1..];
        let mean: f64 = masses.iter().zip(uppers).map(|(p, x)| p * x).sum();
        let var: f64 = masses.iter().zip(uppers).map(|(p, x)| p * (x - mean).powi(2)).sum();
        (mean, var.sqrt())
    }
}

pub fn ecdf_estimator(table: &BinnedTable, levels: &[f64]) -> Result<EstimatorReport> {
    let ecdf = BinnedEcdf::new(table)?;
    let (mean, sd) = ecdf.moments();
    EstimatorReport::build(Method::Ecdf, levels, |q| ecdf.quantile(q), mean, sd)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binned::{validate_table, RawTable};

    #[test]
    fn single_bin_is_point_mass() {
        let t = validate_table(RawTable::counts(vec![0.0, 1.0], vec![7.0])).unwrap();
        let r = ecdf_estimator(&t, &[0.5]).unwrap();
        assert_eq!((r.quantiles[0], r.mean, r.sd), (1.0, 1.0, 0.0));
    }

    #[test]
    fn equal_bins() {
        let t = validate_table(RawTable::counts(vec![0.0, 0.25, 0.5, 0.75, 1.0], vec![3.0; 4])).unwrap();
        let r = ecdf_estimator(&t, &[0.25, 0.5]).unwrap();
        assert_eq!(r.quantiles, vec![0.25, 0.5]);
        let e = BinnedEcdf::new(&t).unwrap();
        assert_eq!(e.cdf(0.3), 0.25);
        assert_eq!(e.cdf(-1.0), 0.0);
        assert_eq!(e.cdf(2.0), 1.0);
    }

    #[test]
    fn db_january_collapses_quartiles() {
        let t = validate_table(RawTable::percent(vec![0.0, 6.0, 16.0, 180.0], vec![80.9, 11.3, 7.8])).unwrap();
        let r = ecdf_estimator(&t, &[0.25, 0.5, 0.75]).unwrap();
        assert_eq!(r.quantiles, vec![6.0, 6.0, 6.0]);
        assert_eq!(r.iqr, 0.0);
    }

    #[test]
    fn open_ended_rejected() {
        let t = validate_table(RawTable::counts(vec![0.0, 1.0, f64::INFINITY], vec![1.0, 1.0])).unwrap();
        assert!(ecdf_estimator(&t, &[0.5]).is_err());
    }
}
