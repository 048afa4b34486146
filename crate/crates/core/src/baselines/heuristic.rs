//! Midpoint heuristics, interpolated quantiles and the Pareto open-bin tail.

use serde::{Deserialize, Serialize};

use super::report::{check_levels, EstimatorReport, Method, ReportMeta};
use crate::binned::BinnedTable;
use crate::error::{Error, Result};

/// Bin midpoints `(τ_{j−1} + τ_j) / 2`.
pub fn midpoints(table: &BinnedTable) -> Vec<f64> {
    table.edges().windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Grouped-data interpolation quantile
/// `Q(q) = τ_L + (nq − C)/η · W` on the class containing `q`.
///
/// Uses counts when the table has them, proportions otherwise. A target
/// class with zero frequency resolves to its lower boundary.
pub fn linear_quantile(table: &BinnedTable, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidLevel(q));
    }
    let weights = table.weights();
    let edges = table.edges();
    let target = q * table.total();
    let mut before = 0.0;
    for (j, &eta) in weights.iter().enumerate() {
        let through = before + eta;
        if through >= target || j + 1 == weights.len() {
            if eta == 0.0 {
                return Ok(edges[j]);
            }
            let width = edges[j + 1] - edges[j];
            if width.is_infinite() {
                return Err(Error::OpenEnded(format!(
                    "quantile {q} falls in the open-ended last class"
                )));
            }
            let frac = ((target - before) / eta).clamp(0.0, 1.0);
            return Ok(edges[j] + frac * width);
        }
        before = through;
    }
    unreachable!("tables have at least one bin")
}

/// Divisor used for the heuristic standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SdForm {
    #[default]
    Population,
    /// `n − 1` divisor; needs a count table.
    Sample,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HeuristicOptions {
    pub sd_form: SdForm,
}

/// Pareto shape estimate and open-bin midpoints for the last class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoTail {
    pub gamma_hat: f64,
    /// Pareto midpoint `τ_{r−1} γ/(γ − 1)`, defined only for `γ > 1`.
    pub pme_point: Option<f64>,
    /// Robust (harmonic-mean) Pareto midpoint `τ_{r−1}(1 + 1/γ)`.
    pub rpme_point: f64,
}

/// `γ̂ = ln((η_{r−1} + η_r)/η_r) / ln(τ_{r−1}/τ_{r−2})` from the top two bins.
pub fn pareto_tail(table: &BinnedTable) -> Result<ParetoTail> {
    let r = table.bins();
    if r < 3 {
        return Err(Error::InvalidParameter(format!("Pareto tail needs at least 3 bins, got {r}")));
    }
    let w = table.weights();
    let e = table.edges();
    let (eta_prev, eta_last) = (w[r - 2], w[r - 1]);
    let (tau_prev, tau_prev2) = (e[r - 1], e[r - 2]);
    if eta_last <= 0.0 {
        return Err(Error::InvalidParameter("last bin is empty".into()));
    }
    if tau_prev2 <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "threshold τ_(r−2) = {tau_prev2} must be positive"
        )));
    }
    let gamma_hat = ((eta_prev + eta_last) / eta_last).ln() / (tau_prev / tau_prev2).ln();
    if !(gamma_hat > 0.0) {
        return Err(Error::InvalidParameter(format!("Pareto shape {gamma_hat} is not positive")));
    }
    let pme_point = (gamma_hat > 1.0).then(|| tau_prev * gamma_hat / (gamma_hat - 1.0));
    Ok(ParetoTail { gamma_hat, pme_point, rpme_point: tau_prev * (1.0 + 1.0 / gamma_hat) })
}

/// Midpoint mean and SD, interpolated quantiles.
///
/// An open-ended last class contributes its robust Pareto midpoint to the
/// moments.
pub fn heuristic_stats(
    table: &BinnedTable,
    levels: &[f64],
    options: HeuristicOptions,
) -> Result<EstimatorReport> {
    check_levels(levels)?;
    let mut mids = midpoints(table);
    let mut meta = ReportMeta::default();
    if table.is_open_ended() {
        let tail = pareto_tail(table)?;
        *mids.last_mut().unwrap() = tail.rpme_point;
        meta.tail = Some(format!("rpme gamma={}", tail.gamma_hat));
    }
    let p = table.proportions();
    let mean: f64 = p.iter().zip(&mids).map(|(p, x)| p * x).sum();
    let mut var: f64 = p.iter().zip(&mids).map(|(p, x)| p * (x - mean).powi(2)).sum();
    if options.sd_form == SdForm::Sample {
        let n = table
            .n()
            .ok_or_else(|| Error::InvalidParameter("sample SD needs a count table".into()))?;
        if n <= 1.0 {
            return Err(Error::InvalidParameter("sample SD needs n > 1".into()));
        }
        var *= n / (n - 1.0);
    }
    let mut report = EstimatorReport::build(
        Method::Heuristic,
        levels,
        |q| linear_quantile(table, q),
        mean,
        var.sqrt(),
    )?;
    report.meta = meta;
    Ok(report)
}
