//! Monte-Carlo comparison of the estimators against known distributions.
//!
//! Each replicate draws a sample, bins it on equidistant cut-points, and
//! estimates quantiles, mean and SD directly from the sample (`D`) and from
//! the binned table with the spline (`S`), heuristic (`H`), eCDF (`E`) and
//! kernel (`K`) estimators. Paired differences `truth − estimate` are kept
//! per replicate.
//!
//! # Seeding
//!
//! The seed of replicate `i` of distribution `d` is
//! `mix(mix(mix(master) ^ d) ^ i)` where `mix` is the SplitMix64 finalizer.
//! The seed initializes a ChaCha8 stream (`rand_chacha`), so results do not
//! depend on scheduling and any implementation of the same generator can
//! reproduce them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    ecdf_estimator, heuristic_stats, kernel_estimator, spline_report, EstimatorReport,
    HeuristicOptions, KernelOptions, Method, DEFAULT_LEVELS,
};
use crate::binned::{bin_sample, to_cumulative, validate_table};
use crate::distributions::{DistributionSpec, RNG_NAME};
use crate::error::{Error, Result};
use crate::mics::MonotoneCubicCdf;
use crate::stats::{five_number, sample_moments, type7_quantile, FiveNumber};

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_seed(master: u64, distribution: usize, replicate: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ distribution as u64) ^ replicate as u64)
}

fn default_sizes() -> Vec<usize> {
    vec![100, 1000]
}

fn default_replicates() -> usize {
    1000
}

fn default_cut_points() -> usize {
    6
}

fn default_levels() -> Vec<f64> {
    DEFAULT_LEVELS.to_vec()
}

fn default_distributions() -> Vec<DistributionSpec> {
    DistributionSpec::study_defaults()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    #[serde(default = "default_distributions")]
    pub distributions: Vec<DistributionSpec>,
    /// Sample sizes; one study cell per distribution and size.
    #[serde(default = "default_sizes")]
    pub sample_sizes: Vec<usize>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Interior cut-points; the table has one more class.
    #[serde(default = "default_cut_points")]
    pub cut_points: usize,
    #[serde(default = "default_levels")]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            distributions: default_distributions(),
            sample_sizes: default_sizes(),
            replicates: default_replicates(),
            cut_points: default_cut_points(),
            levels: default_levels(),
            master_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.distributions.is_empty() {
            return Err(Error::Config("distributions: at least one required".into()));
        }
        if self.replicates < 1 {
            return Err(Error::Config("replicates: must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 10) {
            return Err(Error::Config("sample_sizes: each n must be at least 10".into()));
        }
        if self.cut_points < 2 {
            return Err(Error::Config("cut_points: must be at least 2".into()));
        }
        if self.levels.is_empty() {
            return Err(Error::Config("levels: at least one quantile level required".into()));
        }
        crate::baselines::check_levels(&self.levels)
            .map_err(|e| Error::Config(format!("levels: {e}")))
    }

    pub fn generator(&self) -> &'static str {
        RNG_NAME
    }
}

/// `cut_points` equidistant interior thresholds plus the range ends.
pub fn make_edges(spec: &DistributionSpec, cut_points: usize) -> Result<Vec<f64>> {
    if cut_points == 0 {
        return Err(Error::InvalidParameter("need at least one cut-point".into()));
    }
    let (lo, hi) = spec.range();
    let classes = cut_points + 1;
    let mut edges: Vec<f64> = (0..classes)
        .map(|k| lo + k as f64 * (hi - lo) / classes as f64)
        .collect();
    edges.push(hi);
    Ok(edges)
}

/// Theoretical targets for the paired differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrueValues {
    pub levels: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

impl TrueValues {
    pub fn of(spec: &DistributionSpec, levels: &[f64]) -> Result<Self> {
        Ok(Self {
            levels: levels.to_vec(),
            quantiles: levels.iter().map(|&q| spec.quantile(q)).collect::<Result<_>>()?,
            mean: spec.mean(),
            sd: spec.sd(),
        })
    }
}

/// Name of a compared quantity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    /// Quantile at a level, stored as the level's text form.
    Quantile(String),
    Mean,
    Sd,
}

impl Metric {
    pub fn quantile(level: f64) -> Self {
        Metric::Quantile(format!("{level}"))
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Metric::Quantile(l) => write!(f, "q{l}"),
            Metric::Mean => write!(f, "mean"),
            Metric::Sd => write!(f, "sd"),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Metric::Mean),
            "sd" => Ok(Metric::Sd),
            q if q.starts_with('q') && q[1..].parse::<f64>().is_ok() => Ok(Metric::Quantile(q[1..].to_string())),
            other => Err(Error::InvalidParameter(format!("unknown metric {other:?}"))),
        }
    }
}

/// `Δ = truth − estimate` for each quantile level, the mean and the SD.
pub fn paired_differences(truth: &TrueValues, report: &EstimatorReport) -> Result<Vec<(Metric, f64)>> {
    if truth.levels != report.levels {
        return Err(Error::LevelMismatch);
    }
    let mut out: Vec<(Metric, f64)> = truth
        .levels
        .iter()
        .zip(truth.quantiles.iter().zip(&report.quantiles))
        .map(|(&l, (t, e))| (Metric::quantile(l), t - e))
        .collect();
    out.push((Metric::Mean, truth.mean - report.mean));
    out.push((Metric::Sd, truth.sd - report.sd));
    Ok(out)
}

/// Report computed from the raw sample.
pub fn direct_report(sample: &[f64], levels: &[f64]) -> Result<EstimatorReport> {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mean, sd) = sample_moments(&sorted);
    EstimatorReport::build(Method::Direct, levels, |q| Ok(type7_quantile(&sorted, q)), mean, sd)
}

/// Reports of all binned methods for one table; order S, H, E, K.
pub fn binned_reports(
    table: &crate::binned::BinnedTable,
    levels: &[f64],
) -> Result<Vec<EstimatorReport>> {
    let spline = MonotoneCubicCdf::fit(&to_cumulative(table))?;
    Ok(vec![
        spline_report(&spline, levels)?,
        heuristic_stats(table, levels, HeuristicOptions::default())?,
        ecdf_estimator(table, levels)?,
        kernel_estimator(table, levels, KernelOptions::default())?,
    ])
}

/// Reports D, S, H, E, K for one replicate.
pub fn run_replicate(
    spec: &DistributionSpec,
    distribution_index: usize,
    n: usize,
    config: &SimConfig,
    replicate: usize,
) -> Result<Vec<EstimatorReport>> {
    let seed = replicate_seed(config.master_seed, distribution_index, replicate);
    let sample = spec.sample(n, seed);
    let edges = make_edges(spec, config.cut_points)?;
    let table = validate_table(bin_sample(&sample, &edges)?)?;
    let mut reports = vec![direct_report(&sample, &config.levels)?];
    reports.extend(binned_reports(&table, &config.levels)?);
    Ok(reports)
}

/// Identifies one cell of the study.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub distribution: usize,
    pub n: usize,
    pub method: Method,
    pub metric: Metric,
}

/// Raw paired differences, one vector per cell indexed by replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyResults {
    pub labels: Vec<String>,
    pub cells: BTreeMap<CellKey, Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Serial,
    Parallel,
}

type Task = (usize, usize, usize);
type TaskDeltas = Vec<(Method, Vec<(Metric, f64)>)>;

fn run_task(config: &SimConfig, truths: &[TrueValues], (d, n, rep): Task) -> Result<TaskDeltas> {
    let spec = &config.distributions[d];
    run_replicate(spec, d, n, config, rep)?
        .iter()
        .map(|r| Ok((r.method, paired_differences(&truths[d], r)?)))
        .collect()
}

pub fn run_study(config: &SimConfig, execution: Execution) -> Result<StudyResults> {
    config.validate()?;
    let truths = config
        .distributions
        .iter()
        .map(|s| TrueValues::of(s, &config.levels))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<Task> = (0..config.distributions.len())
        .flat_map(|d| {
            config
                .sample_sizes
                .iter()
                .flat_map(move |&n| (0..config.replicates).map(move |r| (d, n, r)))
        })
        .collect();
    let outcomes: Vec<_> = match execution {
        Execution::Serial => tasks.iter().map(|&t| run_task(config, &truths, t)).collect(),
        Execution::Parallel => tasks.par_iter().map(|&t| run_task(config, &truths, t)).collect(),
    };
    let mut cells: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for (&(d, n, rep), outcome) in tasks.iter().zip(outcomes) {
        for (method, deltas) in outcome? {
            for (metric, delta) in deltas {
                let v = cells
                    .entry(CellKey { distribution: d, n, method, metric })
                    .or_insert_with(|| vec![f64::NAN; config.replicates]);
                v[rep] = delta;
            }
        }
    }
    let labels = config.distributions.iter().map(|s| s.to_string()).collect();
    Ok(StudyResults { labels, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryCell {
    pub distribution: String,
    pub n: usize,
    pub method: Method,
    pub metric: String,
    pub summary: FiveNumber,
    pub median_abs: f64,
    pub deltas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub replicates: usize,
    pub cells: Vec<SummaryCell>,
}

impl StudySummary {
    pub fn cell(&self, distribution: &str, n: usize, method: Method, metric: &Metric) -> Option<&SummaryCell> {
        let metric = metric.to_string();
        self.cells
            .iter()
            .find(|c| c.distribution == distribution && c.n == n && c.method == method && c.metric == metric)
    }
}

pub fn summarize(results: &StudyResults) -> Result<StudySummary> {
    let mut replicates = 0;
    let cells = results
        .cells
        .iter()
        .map(|(key, deltas)| {
            if deltas.is_empty() {
                return Err(Error::Config("summary needs at least one replicate".into()));
            }
            replicates = deltas.len();
            let abs: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
            Ok(SummaryCell {
                distribution: results.labels[key.distribution].clone(),
                n: key.n,
                method: key.method,
                metric: key.metric.to_string(),
                summary: five_number(deltas),
                median_abs: five_number(&abs).median,
                deltas: deltas.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StudySummary { replicates, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_cell_config() -> SimConfig {
        SimConfig {
            distributions: vec![DistributionSpec::normal(3.0, 1.0, (0.0, 10.0)).unwrap()],
            sample_sizes: vec![1000],
            replicates: 1,
            master_seed: 11,
            ..SimConfig::default()
        }
    }

    #[test]
    fn edges_are_equidistant() {
        let t = DistributionSpec::triangular(0.0, 1.0, 0.5, (0.0, 1.0)).unwrap();
        let e = make_edges(&t, 6).unwrap();
        assert_eq!(e.len(), 8);
        for (k, v) in e.iter().enumerate() {
            assert!((v - k as f64 / 7.0).abs() < 1e-15);
        }
        let n = DistributionSpec::normal(3.0, 1.0, (0.0, 10.0)).unwrap();
        assert_eq!(make_edges(&n, 1).unwrap(), vec![0.0, 5.0, 10.0]);
        let g = DistributionSpec::gumbel(1.0, 2.0, (-4.0, 35.0)).unwrap();
        let e = make_edges(&g, 6).unwrap();
        assert!((e[2] - e[1] - 39.0 / 7.0).abs() < 1e-12);
        assert!(make_edges(&g, 0).is_err());
    }

    #[test]
    fn seeds_differ_across_indices() {
        let a = replicate_seed(1, 0, 0);
        assert_ne!(a, replicate_seed(1, 0, 1));
        assert_ne!(a, replicate_seed(1, 1, 0));
        assert_ne!(a, replicate_seed(2, 0, 0));
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn replicate_yields_five_reports() {
        let cfg = one_cell_config();
        let reports = run_replicate(&cfg.distributions[0], 0, 1000, &cfg, 0).unwrap();
        let tags: String = reports.iter().map(|r| r.method.tag()).collect();
        assert_eq!(tags, "DSHEK");
        assert!((reports[0].quantile_at(0.5).unwrap() - 3.0).abs() < 0.15);
        assert_eq!(reports, run_replicate(&cfg.distributions[0], 0, 1000, &cfg, 0).unwrap());
    }

    #[test]
    fn differences_sign_convention() {
        let truth = TrueValues { levels: vec![0.5], quantiles: vec![3.0], mean: 3.0, sd: 1.0 };
        let est = EstimatorReport::build(Method::Spline, &[0.5], |_| Ok(2.8), 3.0, 1.0).unwrap();
        let d = paired_differences(&truth, &est).unwrap();
        assert!((d[0].1 - 0.2).abs() < 1e-15);
        assert_eq!(d[1], (Metric::Mean, 0.0));
        let other = EstimatorReport::build(Method::Spline, &[0.25], |_| Ok(2.8), 3.0, 1.0).unwrap();
        assert!(matches!(paired_differences(&truth, &other), Err(Error::LevelMismatch)));
    }

    #[test]
    fn single_replicate_summary() {
        let cfg = one_cell_config();
        let res = run_study(&cfg, Execution::Serial).unwrap();
        let sum = summarize(&res).unwrap();
        assert_eq!(sum.cells.len(), 5 * 5);
        for c in &sum.cells {
            let d = c.deltas[0];
            assert_eq!(c.summary, FiveNumber { min: d, q1: d, median: d, q3: d, max: d });
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = SimConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.replicates = 0;
        assert!(matches!(cfg.validate(), Err(Error::Config(m)) if m.starts_with("replicates")));
        let cfg = SimConfig { sample_sizes: vec![5], ..SimConfig::default() };
        assert!(cfg.validate().is_err());
        let cfg = SimConfig { cut_points: 1, ..SimConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in [Metric::quantile(0.25), Metric::Mean, Metric::Sd] {
            assert_eq!(m.to_string().parse::<Metric>().unwrap(), m);
        }
        assert_eq!(Metric::quantile(0.5).to_string(), "q0.5");
    }
}
