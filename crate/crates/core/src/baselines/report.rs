use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mics::MonotoneCubicCdf;

/// Quartile levels used when none are requested.
pub const DEFAULT_LEVELS: [f64; 3] = [0.25, 0.5, 0.75];

/// Estimation method tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Direct estimate from the unbinned sample.
    #[serde(rename = "D")]
    Direct,
    /// Monotone interpolating cubic spline.
    #[serde(rename = "S")]
    Spline,
    /// Midpoint moments with interpolated quantiles.
    #[serde(rename = "H")]
    Heuristic,
    /// Binned empirical CDF.
    #[serde(rename = "E")]
    Ecdf,
    /// Gaussian kernel CDF over the midpoint pseudo-sample.
    #[serde(rename = "K")]
    Kernel,
    /// Relative cumulative frequency plot (linear interpolation).
    #[serde(rename = "R")]
    Rcfp,
}

impl Method {
    pub const BINNED: [Method; 4] = [Method::Spline, Method::Heuristic, Method::Ecdf, Method::Kernel];

    pub fn tag(self) -> char {
        match self {
            Method::Direct => 'D',
            Method::Spline => 'S',
            Method::Heuristic => 'H',
            Method::Ecdf => 'E',
            Method::Kernel => 'K',
            Method::Rcfp => 'R',
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "D" => Ok(Method::Direct),
            "S" | "SPLINE" | "MICS" => Ok(Method::Spline),
            "H" | "HEURISTIC" => Ok(Method::Heuristic),
            "E" | "ECDF" => Ok(Method::Ecdf),
            "K" | "KERNEL" => Ok(Method::Kernel),
            "R" | "RCFP" => Ok(Method::Rcfp),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// Conventions behind a report, recorded for reproducibility.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nominal_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_fallback: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub method: Method,
    pub levels: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub iqr: f64,
    #[serde(default)]
    pub meta: ReportMeta,
}

impl EstimatorReport {
    /// Assembles a report from a quantile function; `iqr` uses the same
    /// function at 0.25 and 0.75.
    pub fn build(
        method: Method,
        levels: &[f64],
        mut quantile: impl FnMut(f64) -> Result<f64>,
        mean: f64,
        sd: f64,
    ) -> Result<Self> {
        check_levels(levels)?;
        let quantiles = levels.iter().map(|&q| quantile(q)).collect::<Result<Vec<_>>>()?;
        let iqr = quantile(0.75)? - quantile(0.25)?;
        Ok(Self {
            method,
            levels: levels.to_vec(),
            quantiles,
            mean,
            sd,
            iqr,
            meta: ReportMeta::default(),
        })
    }

    pub fn quantile_at(&self, level: f64) -> Option<f64> {
        self.levels.iter().position(|&l| l == level).map(|i| self.quantiles[i])
    }
}

/// Levels must lie in `[0, 1]` and be non-decreasing.
pub fn check_levels(levels: &[f64]) -> Result<()> {
    if let Some(&q) = levels.iter().find(|q| !(0.0..=1.0).contains(*q)) {
        return Err(Error::InvalidLevel(q));
    }
    if levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("quantile levels must be non-decreasing".into()));
    }
    Ok(())
}

pub fn spline_report(spline: &MonotoneCubicCdf, levels: &[f64]) -> Result<EstimatorReport> {
    let (mean, sd) = spline.moments()?;
    EstimatorReport::build(Method::Spline, levels, |q| spline.quantile(q), mean, sd)
}
