//! Binned frequency tables and their cumulative curves.
//!
//! A [`BinnedTable`] holds thresholds `τ_0 < … < τ_r` and one frequency per
//! bin. Frequencies are either raw counts (the total `n` is then known) or
//! relative frequencies; published tables given in percent are normalized
//! on ingestion and carry no `n`.
//!
//! Bin membership follows the right-closed rule `τ_{j-1} < y ≤ τ_j`, with a
//! value exactly at `τ_0` assigned to the first bin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the sum of relative frequencies.
pub const PROPORTION_SUM_TOL: f64 = 1e-9;

/// Allowed rounding slack on published percentage columns.
pub const PERCENT_SUM_TOL: f64 = 0.5;

/// How the frequencies of a [`RawTable`] are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Counts,
    Percent,
    Proportions,
}

/// Unvalidated table as parsed from a file or built by hand.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: WeightKind,
}

impl RawTable {
    pub fn counts(edges: Vec<f64>, counts: Vec<f64>) -> Self {
        Self { edges, weights: counts, kind: WeightKind::Counts }
    }

    pub fn percent(edges: Vec<f64>, percent: Vec<f64>) -> Self {
        Self { edges, weights: percent, kind: WeightKind::Percent }
    }

    pub fn proportions(edges: Vec<f64>, proportions: Vec<f64>) -> Self {
        Self { edges, weights: proportions, kind: WeightKind::Proportions }
    }

    /// Builds a percent table by differencing cumulative percentages.
    ///
    /// `thresholds[0]` is the lower limit with cumulative value 0. The last
    /// threshold closes the table at 100 percent unless `upper` supplies the
    /// closing limit, in which case the remainder goes into a final bin
    /// `(thresholds.last(), upper]`.
    pub fn from_cumulative_percent(
        thresholds: &[f64],
        cum_percent: &[f64],
        upper: Option<f64>,
    ) -> Result<Self> {
        if thresholds.len() != cum_percent.len() {
            return Err(Error::LengthMismatch {
                edges: thresholds.len() + 1,
                weights: cum_percent.len(),
            });
        }
        if thresholds.is_empty() {
            return Err(Error::TooFewEdges(0));
        }
        if cum_percent[0] != 0.0 {
            return Err(Error::InvalidCurve(format!(
                "first cumulative percentage must be 0, got {}",
                cum_percent[0]
            )));
        }
        let mut edges = thresholds.to_vec();
        let mut cum = cum_percent.to_vec();
        match upper {
            Some(limit) => {
                let last = *edges.last().unwrap();
                if (cum.last().copied() == Some(100.0)) && edges.len() > 1 {
                    // the declared terminal is replaced by the supplied limit
                    let prev = edges[edges.len() - 2];
                    if !(limit > prev) {
                        return Err(Error::UpperLimit { limit, bound: prev });
                    }
                    *edges.last_mut().unwrap() = limit;
                } else {
                    if !(limit > last) {
                        return Err(Error::UpperLimit { limit, bound: last });
                    }
                    edges.push(limit);
                    cum.push(100.0);
                }
            }
            None => {
                if cum.last().copied() != Some(100.0) {
                    return Err(Error::InvalidCurve(
                        "cumulative percentages must end at 100 or an upper limit must be given"
                            .into(),
                    ));
                }
            }
        }
        for (i, w) in cum.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(Error::NegativeWeight { index: i, value: w[1] - w[0] });
            }
        }
        let weights = cum.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self::percent(edges, weights))
    }
}

/// Validated binned table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedTable {
    edges: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
    n: Option<f64>,
}

impl BinnedTable {
    pub fn new(raw: RawTable) -> Result<Self> {
        validate_table(raw)
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Frequencies as stored: counts when `n` is known, proportions otherwise.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total count, absent for tables supplied as relative frequencies.
    pub fn n(&self) -> Option<f64> {
        self.n
    }

    /// Sum of the stored weights (equals `n` for count tables).
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn bins(&self) -> usize {
        self.weights.len()
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().unwrap()
    }

    pub fn is_open_ended(&self) -> bool {
        self.upper().is_infinite()
    }

    pub fn proportions(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total).collect()
    }

    /// Cumulative relative frequency at each edge, `F_0 = 0` and `F_r = 1`.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.edges.len());
        out.push(0.0);
        let mut acc = 0.0;
        for w in &self.weights {
            acc += w;
            out.push((acc / self.total).min(1.0));
        }
        *out.last_mut().unwrap() = 1.0;
        out
    }

    /// Same table with the last edge replaced.
    pub fn with_upper(&self, upper: f64) -> Result<Self> {
        let mut edges = self.edges.clone();
        *edges.last_mut().unwrap() = upper;
        let kind = if self.n.is_some() { WeightKind::Counts } else { WeightKind::Proportions };
        let weights = match kind {
            WeightKind::Counts => self.weights.clone(),
            _ => self.proportions(),
        };
        validate_table(RawTable { edges, weights, kind })
    }
}

/// Checks every table invariant and normalizes percentages to proportions.
pub fn validate_table(raw: RawTable) -> Result<BinnedTable> {
    let RawTable { edges, weights, kind } = raw;
    if edges.len() < 2 {
        return Err(Error::TooFewEdges(edges.len()));
    }
    if edges.len() != weights.len() + 1 {
        return Err(Error::LengthMismatch { edges: edges.len(), weights: weights.len() });
    }
    let last = edges.len() - 1;
    for (i, &e) in edges.iter().enumerate() {
        let ok = e.is_finite() || (i == last && e == f64::INFINITY);
        if !ok {
            return Err(Error::NonFiniteEdge { index: i });
        }
    }
    if let Some(i) = edges.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonIncreasingEdges { index: i + 1 });
    }
    for (i, &w) in weights.iter().enumerate() {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(Error::NegativeWeight { index: i, value: w });
        }
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::AllZero);
    }
    match kind {
        WeightKind::Counts => Ok(BinnedTable { edges, weights, total: sum, n: Some(sum) }),
        WeightKind::Percent => {
            if (sum - 100.0).abs() > PERCENT_SUM_TOL {
                return Err(Error::PercentSum { sum });
            }
            let weights: Vec<f64> = weights.iter().map(|w| w / sum).collect();
            let total = weights.iter().sum();
            Ok(BinnedTable { edges, weights, total, n: None })
        }
        WeightKind::Proportions => {
            if (sum - 1.0).abs() > PROPORTION_SUM_TOL {
                return Err(Error::ProportionSum { sum });
            }
            Ok(BinnedTable { edges, weights, total: sum, n: None })
        }
    }
}

/// Index of the bin holding `v`: `τ_{j-1} < v ≤ τ_j`, with `τ_0` in bin 0.
fn bin_index(edges: &[f64], v: f64) -> Option<usize> {
    let lo = edges[0];
    let hi = *edges.last().unwrap();
    if !(v >= lo && v <= hi) {
        return None;
    }
    // first edge ≥ v, skipping τ_0
    let k = edges[1..].partition_point(|&e| e < v);
    Some(k)
}

/// Bins raw observations into counts over `edges`.
///
/// The result is not validated so an all-empty table can still be
/// inspected; pass it through [`validate_table`] before estimation.
pub fn bin_sample(values: &[f64], edges: &[f64]) -> Result<RawTable> {
    if edges.len() < 2 {
        return Err(Error::TooFewEdges(edges.len()));
    }
    if let Some(i) = edges.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NonIncreasingEdges { index: i + 1 });
    }
    let mut counts = vec![0.0; edges.len() - 1];
    for (i, &v) in values.iter().enumerate() {
        let k = bin_index(edges, v).ok_or(Error::ValueOutOfRange {
            index: i,
            value: v,
            lo: edges[0],
            hi: *edges.last().unwrap(),
        })?;
        counts[k] += 1.0;
    }
    Ok(RawTable::counts(edges.to_vec(), counts))
}

/// Node pairs `(τ_j, F_j)` of an empirical CDF observed at the thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeCurve {
    taus: Vec<f64>,
    probs: Vec<f64>,
}

impl CumulativeCurve {
    pub fn new(taus: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if taus.len() != probs.len() {
            return Err(Error::InvalidCurve(format!(
                "{} thresholds but {} probabilities",
                taus.len(),
                probs.len()
            )));
        }
        if taus.len() < 2 {
            return Err(Error::InvalidCurve("need at least two nodes".into()));
        }
        let last = taus.len() - 1;
        for (i, &t) in taus.iter().enumerate() {
            if !(t.is_finite() || (i == last && t == f64::INFINITY)) {
                return Err(Error::NonFiniteEdge { index: i });
            }
        }
        if let Some(i) = taus.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonIncreasingEdges { index: i + 1 });
        }
        if probs[0] != 0.0 || probs[last] != 1.0 {
            return Err(Error::InvalidCurve("curve must start at 0 and end at 1".into()));
        }
        if let Some(i) = probs.windows(2).position(|w| !(w[1] >= w[0])) {
            return Err(Error::NonMonotoneNode { tau: taus[i + 1], prob: probs[i + 1] });
        }
        Ok(Self { taus, probs })
    }

    /// Convenience constructor from `(τ, F)` pairs.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let (taus, probs) = points.iter().copied().unzip();
        Self::new(taus, probs)
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.taus.iter().copied().zip(self.probs.iter().copied())
    }

    /// Bin masses recovered by differencing the curve.
    pub fn increments(&self) -> Vec<f64> {
        self.probs.windows(2).map(|w| w[1] - w[0]).collect()
    }
}

pub fn to_cumulative(table: &BinnedTable) -> CumulativeCurve {
    CumulativeCurve {
        taus: table.edges().to_vec(),
        probs: table.cumulative(),
    }
}

/// Where [`augment_curve`] puts a new upper limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalMode {
    /// Move the node at `F = 1` to the new limit.
    Move,
    /// Keep the existing terminal and append `(limit, 1)` after it.
    Append,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperLimit {
    pub tau: f64,
    pub mode: TerminalMode,
}

/// Merges pseudo nodes into a curve, optionally relocating the upper limit.
///
/// The upper limit is applied first; pseudo nodes are then inserted in
/// sorted order and must keep τ strictly increasing and F non-decreasing.
pub fn augment_curve(
    curve: &CumulativeCurve,
    pseudo_nodes: &[(f64, f64)],
    upper: Option<UpperLimit>,
) -> Result<CumulativeCurve> {
    let mut taus = curve.taus.clone();
    let mut probs = curve.probs.clone();
    if let Some(UpperLimit { tau, mode }) = upper {
        if !tau.is_finite() {
            return Err(Error::NonFiniteSupport);
        }
        let last = taus.len() - 1;
        match mode {
            TerminalMode::Move => {
                let bound = taus[last - 1];
                if !(tau > bound) {
                    return Err(Error::UpperLimit { limit: tau, bound });
                }
                taus[last] = tau;
            }
            TerminalMode::Append => {
                if !(tau > taus[last]) {
                    return Err(Error::UpperLimit { limit: tau, bound: taus[last] });
                }
                taus.push(tau);
                probs.push(1.0);
            }
        }
    }
    let mut sorted = pseudo_nodes.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (tau, prob) in sorted {
        if !tau.is_finite() || !(0.0..=1.0).contains(&prob) {
            return Err(Error::NonMonotoneNode { tau, prob });
        }
        let k = taus.partition_point(|&t| t < tau);
        if k < taus.len() && taus[k] == tau {
            return Err(Error::NonIncreasingEdges { index: k });
        }
        let below_ok = k == 0 || probs[k - 1] <= prob;
        let above_ok = k == taus.len() || prob <= probs[k];
        if !below_ok || !above_ok || (k == 0 && prob != 0.0) {
            return Err(Error::NonMonotoneNode { tau, prob });
        }
        taus.insert(k, tau);
        probs.insert(k, prob);
    }
    CumulativeCurve::new(taus, probs)
}
