//! Command-line front end.
//!
//! Every command writes its artifacts into an output directory together
//! with a `manifest.json` recording the command line, input digest, crate
//! version, seed and the SHA-256 of each artifact. Failures print a JSON
//! object on stderr and exit with 2 (bad input) or 3 (numerical failure).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::baselines::{
    ecdf_estimator, heuristic_stats, kernel_estimator, rcfp_estimator, spline_report,
    BinnedEcdf, EstimatorReport, HeuristicOptions, KernelCdf, KernelOptions, LinearCdf, Method,
    DEFAULT_LEVELS, DEFAULT_NOMINAL_N,
};
use crate::binned::{augment_curve, to_cumulative, validate_table, BinnedTable};
use crate::error::{Error, Result};
use crate::io::{self, OutputDir, RunManifest, TableInput};
use crate::mics::{MonotoneCubicCdf, SplineSample, DEFAULT_GRID};
use crate::sim::{run_study, summarize, Execution, SimConfig, StudySummary};

/// Environment variable holding the default master seed.
pub const SEED_ENV: &str = "BINCDF_SEED";

#[derive(Debug, Parser, Serialize)]
#[command(name = "bincdf", version, about = "Estimate distributions from binned frequency tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Fit the estimators to one table and write reports and CDF samples.
    Estimate(EstimateArgs),
    /// Re-run the estimators for a list of upper limits of the last class.
    SweepUpper(SweepArgs),
    /// Run the seeded Monte-Carlo comparison described by a config file.
    Simulate(SimulateArgs),
    /// Write the fitted spline as a sample grid and a coefficient dump.
    ExportSpline(ExportArgs),
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct TableArgs {
    /// Table CSV (`lower,upper,count|percent|proportion` or `threshold,cum_percent`).
    pub input: PathBuf,
    /// Upper limit of the last class.
    #[arg(long)]
    pub upper_limit: Option<f64>,
    /// Extra cumulative node `τ:F` beyond the upper limit; repeatable.
    #[arg(long = "pseudo-node", value_parser = parse_node)]
    pub pseudo_nodes: Vec<(f64, f64)>,
}

#[derive(Debug, Args, Serialize, Clone)]
pub struct MethodArgs {
    /// Quantile levels.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS.to_vec())]
    pub quantiles: Vec<f64>,
    /// Fixed kernel bandwidth (Silverman's rule when absent).
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Pseudo-sample size for tables without counts.
    #[arg(long, default_value_t = DEFAULT_NOMINAL_N)]
    pub nominal_n: f64,
    /// Methods to run: S (spline), H (heuristic), E (eCDF), K (kernel), R (linear CDF).
    #[arg(long, value_delimiter = ',', default_value = "S,H,E,K")]
    pub methods: Vec<Method>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[command(flatten)]
    pub methods: MethodArgs,
    /// Number of CDF sample points per method.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Table CSV.
    pub input: PathBuf,
    /// Upper limits, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub limits: Vec<f64>,
    #[arg(long = "pseudo-node", value_parser = parse_node)]
    pub pseudo_nodes: Vec<(f64, f64)>,
    #[command(flatten)]
    pub methods: MethodArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Study config, TOML or JSON.
    pub config: PathBuf,
    /// Override the number of replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Run a single sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed; falls back to the config file, then the environment.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run replicates on one thread.
    #[arg(long)]
    pub serial: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

fn parse_node(s: &str) -> std::result::Result<(f64, f64), String> {
    let (t, f) = s.split_once(':').ok_or_else(|| format!("expected τ:F, got {s:?}"))?;
    let t: f64 = t.trim().parse().map_err(|_| format!("bad τ in {s:?}"))?;
    let f: f64 = f.trim().parse().map_err(|_| format!("bad F in {s:?}"))?;
    Ok((t, f))
}

/// Settings shared by `estimate` and `sweep-upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub upper_limit: Option<f64>,
    pub pseudo_nodes: Vec<(f64, f64)>,
    pub levels: Vec<f64>,
    pub kernel: KernelOptions,
    pub methods: Vec<Method>,
    pub grid: usize,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            upper_limit: None,
            pseudo_nodes: Vec::new(),
            levels: DEFAULT_LEVELS.to_vec(),
            kernel: KernelOptions::default(),
            methods: Method::BINNED.to_vec(),
            grid: DEFAULT_GRID,
        }
    }
}

/// Reports and CDF samples of one estimation run.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub table: BinnedTable,
    pub spline: Option<MonotoneCubicCdf>,
    pub reports: Vec<EstimatorReport>,
    pub samples: Vec<(Method, Vec<SplineSample>)>,
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    (0..points).map(move |i| {
        if i + 1 == points {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        }
    })
}

fn sample_with(lo: f64, hi: f64, points: usize, f: impl Fn(f64) -> (f64, f64)) -> Vec<SplineSample> {
    grid(lo, hi, points)
        .map(|tau| {
            let (cdf, pdf) = f(tau);
            SplineSample { tau, cdf, pdf }
        })
        .collect()
}

/// Spline through the table's cumulative nodes plus any pseudo nodes.
pub fn fit_spline(table: &BinnedTable, pseudo_nodes: &[(f64, f64)]) -> Result<MonotoneCubicCdf> {
    if let Some(&(tau, _)) = pseudo_nodes.iter().find(|(t, _)| !(*t > table.upper())) {
        return Err(Error::InvalidParameter(format!(
            "pseudo node at {tau} must lie above the upper limit {}",
            table.upper()
        )));
    }
    let curve = augment_curve(&to_cumulative(table), pseudo_nodes, None)?;
    MonotoneCubicCdf::fit(&curve)
}

pub fn estimate(input: &TableInput, options: &EstimateOptions) -> Result<Estimate> {
    let table = validate_table(input.to_raw(options.upper_limit)?)?;
    let mut spline = None;
    let mut reports = Vec::new();
    let mut samples = Vec::new();
    let points = options.grid;
    let (lo, hi) = (table.lower(), table.upper());
    for &method in &options.methods {
        match method {
            Method::Spline => {
                let s = fit_spline(&table, &options.pseudo_nodes)?;
                reports.push(spline_report(&s, &options.levels)?);
                samples.push((method, s.sample_grid(points)));
                spline = Some(s);
            }
            Method::Heuristic => {
                reports.push(heuristic_stats(&table, &options.levels, HeuristicOptions::default())?);
                if !table.is_open_ended() {
                    let lin = LinearCdf::new(&to_cumulative(&table))?;
                    samples.push((method, sample_with(lo, hi, points, |t| (lin.cdf(t), lin.pdf(t)))));
                }
            }
            Method::Rcfp => {
                let curve = to_cumulative(&table);
                reports.push(rcfp_estimator(&curve, &options.levels)?);
                let lin = LinearCdf::new(&curve)?;
                samples.push((method, sample_with(lo, hi, points, |t| (lin.cdf(t), lin.pdf(t)))));
            }
            Method::Ecdf => {
                reports.push(ecdf_estimator(&table, &options.levels)?);
                let e = BinnedEcdf::new(&table)?;
                // a step function has no density
                samples.push((method, sample_with(lo, hi, points, |t| (e.cdf(t), 0.0))));
            }
            Method::Kernel => {
                reports.push(kernel_estimator(&table, &options.levels, options.kernel)?);
                let k = KernelCdf::new(&table, options.kernel)?;
                samples.push((method, sample_with(lo, hi, points, |t| (k.cdf(t), k.pdf(t)))));
            }
            Method::Direct => {
                return Err(Error::InvalidParameter("method D needs raw observations".into()))
            }
        }
    }
    Ok(Estimate { table, spline, reports, samples })
}

/// One value of the upper-limit sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub limit: f64,
    pub method: Method,
    pub metric: String,
    pub value: f64,
}

pub fn sweep_upper(input: &TableInput, limits: &[f64], options: &EstimateOptions) -> Result<Vec<SweepRow>> {
    if limits.is_empty() {
        return Err(Error::InvalidParameter("at least one limit required".into()));
    }
    if let Some(w) = limits.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(format!(
            "limits must be strictly increasing ({} then {})",
            limits[w],
            limits[w + 1]
        )));
    }
    let bound = input.last_finite_threshold();
    if let Some(&limit) = limits.iter().find(|&&l| !(l > bound)) {
        return Err(Error::UpperLimit { limit, bound });
    }
    let mut rows = Vec::new();
    for &limit in limits {
        let est = estimate(input, &EstimateOptions { upper_limit: Some(limit), grid: 2, ..options.clone() })?;
        for r in &est.reports {
            let mut push = |metric: String, value: f64| {
                rows.push(SweepRow { limit, method: r.method, metric, value })
            };
            for (l, q) in r.levels.iter().zip(&r.quantiles) {
                push(format!("q{l}"), *q);
            }
            push("mean".into(), r.mean);
            push("sd".into(), r.sd);
            push("iqr".into(), r.iqr);
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    io::csv_text(
        &["limit", "method", "metric", "value"],
        rows.iter().map(|r| [r.limit.to_string(), r.method.to_string(), r.metric.clone(), r.value.to_string()]),
    )
}

/// Per-cell median |Δ| laid out with one row per distribution, size and method.
pub fn median_table(summary: &StudySummary) -> String {
    let mut metrics: Vec<&str> = Vec::new();
    for c in &summary.cells {
        if !metrics.contains(&c.metric.as_str()) {
            metrics.push(&c.metric);
        }
    }
    let mut out = format!("{:<28} {:>6} {:>3}", "distribution", "n", "m");
    for m in &metrics {
        let _ = write!(out, " {m:>10}");
    }
    out.push('\n');
    let mut keys: Vec<(&str, usize, Method)> = Vec::new();
    for c in &summary.cells {
        let key = (c.distribution.as_str(), c.n, c.method);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    for (d, n, method) in keys {
        let _ = write!(out, "{d:<28} {n:>6} {:>3}", method.tag());
        for m in &metrics {
            let cell = summary
                .cells
                .iter()
                .find(|c| c.distribution == d && c.n == n && c.method == method && c.metric == *m);
            match cell {
                Some(c) => {
                    let _ = write!(out, " {:>10.5}", c.median_abs);
                }
                None => out.push_str(&format!(" {:>10}", "")),
            }
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SummaryView<'a> {
    replicates: usize,
    master_seed: u64,
    generator: &'a str,
    cells: Vec<CellView<'a>>,
}

#[derive(Serialize)]
struct CellView<'a> {
    distribution: &'a str,
    n: usize,
    method: Method,
    metric: &'a str,
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
    median_abs: f64,
}

#[derive(Serialize)]
struct ReportsFile<'a> {
    input: String,
    upper: f64,
    reports: &'a [EstimatorReport],
}

fn manifest(command: &str, args: &impl Serialize, input_digest: Option<String>, seed: Option<u64>) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.into(),
        input_digest,
        config: serde_json::to_value(args)?,
        version: env!("CARGO_PKG_VERSION").into(),
        master_seed: seed,
        generator: seed.map(|_| crate::distributions::RNG_NAME.into()),
        started_unix: io::unix_now(),
        finished_unix: 0,
        outputs: Vec::new(),
    })
}

fn load_input(path: &Path) -> Result<(TableInput, String)> {
    let text = io::read_to_string(path)?;
    let digest = io::sha256_hex(text.as_bytes());
    Ok((io::parse_table(&text, path)?, digest))
}

fn method_options(args: &MethodArgs) -> EstimateOptions {
    EstimateOptions {
        levels: args.quantiles.clone(),
        kernel: KernelOptions { bandwidth: args.bandwidth, nominal_n: args.nominal_n },
        methods: args.methods.clone(),
        ..EstimateOptions::default()
    }
}

fn label(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn cmd_estimate(args: &EstimateArgs) -> Result<String> {
    let (input, digest) = load_input(&args.table.input)?;
    let manifest = manifest("estimate", args, Some(digest), None)?;
    let options = EstimateOptions {
        upper_limit: args.table.upper_limit,
        pseudo_nodes: args.table.pseudo_nodes.clone(),
        grid: args.grid,
        ..method_options(&args.methods)
    };
    let est = estimate(&input, &options)?;
    let name = label(&args.table.input);
    let mut out = OutputDir::create(&args.out)?;
    out.write_json(
        "reports.json",
        &ReportsFile { input: name.clone(), upper: est.table.upper(), reports: &est.reports },
    )?;
    let rows: Vec<(String, EstimatorReport)> =
        est.reports.iter().map(|r| (name.clone(), r.clone())).collect();
    out.write("reports.csv", &io::reports_csv(&rows))?;
    for (method, samples) in &est.samples {
        out.write(&format!("cdf_{}.csv", method.tag()), &io::samples_csv(samples))?;
    }
    out.finish(manifest)?;
    Ok(io::reports_csv(&rows))
}

fn cmd_sweep(args: &SweepArgs) -> Result<String> {
    let (input, digest) = load_input(&args.input)?;
    let manifest = manifest("sweep-upper", args, Some(digest), None)?;
    let options = EstimateOptions { pseudo_nodes: args.pseudo_nodes.clone(), ..method_options(&args.methods) };
    let rows = sweep_upper(&input, &args.limits, &options)?;
    let csv = sweep_csv(&rows);
    let mut out = OutputDir::create(&args.out)?;
    out.write("sweep.csv", &csv)?;
    out.finish(manifest)?;
    Ok(csv)
}

/// Config file value, then the environment, then 0.
fn resolve_seed(flag: Option<u64>, text: &str, is_json: bool, config_seed: u64) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    let in_file = if is_json {
        serde_json::from_str::<serde_json::Value>(text)?.get("master_seed").is_some()
    } else {
        text.parse::<toml::Table>().map(|t| t.contains_key("master_seed")).unwrap_or(false)
    };
    if in_file {
        return Ok(config_seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

/// Applies command-line overrides to a parsed config.
pub fn simulation_config(args: &SimulateArgs) -> Result<(SimConfig, String)> {
    let text = io::read_to_string(&args.config)?;
    let digest = io::sha256_hex(text.as_bytes());
    let mut config = io::parse_config(&text, &args.config)?;
    let is_json = args.config.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    config.master_seed = resolve_seed(args.seed, &text, is_json, config.master_seed)?;
    if let Some(r) = args.replicates {
        config.replicates = r;
    }
    if let Some(n) = args.n {
        config.sample_sizes = vec![n];
    }
    config.validate()?;
    Ok((config, digest))
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String> {
    let (config, digest) = simulation_config(args)?;
    let mut manifest = manifest("simulate", args, Some(digest), Some(config.master_seed))?;
    manifest.config = serde_json::json!({ "args": manifest.config, "effective": config });
    let execution = if args.serial { Execution::Serial } else { Execution::Parallel };
    let summary = summarize(&run_study(&config, execution)?)?;
    let mut out = OutputDir::create(&args.out)?;
    out.write("study.csv", &io::study_csv(&io::delta_rows(&summary)))?;
    out.write("summary.csv", &io::summary_csv(&summary))?;
    let view = SummaryView {
        replicates: summary.replicates,
        master_seed: config.master_seed,
        generator: config.generator(),
        cells: summary
            .cells
            .iter()
            .map(|c| CellView {
                distribution: &c.distribution,
                n: c.n,
                method: c.method,
                metric: &c.metric,
                min: c.summary.min,
                q1: c.summary.q1,
                median: c.summary.median,
                q3: c.summary.q3,
                max: c.summary.max,
                median_abs: c.median_abs,
            })
            .collect(),
    };
    out.write_json("summary.json", &view)?;
    out.finish(manifest)?;
    Ok(median_table(&summary))
}

fn cmd_export(args: &ExportArgs) -> Result<String> {
    let (input, digest) = load_input(&args.table.input)?;
    let manifest = manifest("export-spline", args, Some(digest), None)?;
    let table = validate_table(input.to_raw(args.table.upper_limit)?)?;
    let spline = fit_spline(&table, &args.table.pseudo_nodes)?;
    let mut out = OutputDir::create(&args.out)?;
    let samples = io::samples_csv(&spline.sample_grid(args.grid));
    out.write("spline_samples.csv", &samples)?;
    out.write_json("spline.json", &spline)?;
    out.finish(manifest)?;
    Ok(format!("{} knots, {} samples written to {}\n", spline.knots().len(), args.grid.max(2), args.out.display()))
}

/// Runs a parsed command and returns the text to print on stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::SweepUpper(a) => cmd_sweep(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::ExportSpline(a) => cmd_export(a),
    }
}

/// Machine-readable error line for stderr.
pub fn error_json(err: &Error) -> String {
    serde_json::json!({
        "error": err.to_string(),
        "exit_code": err.exit_code(),
        "numerical": err.is_numerical(),
    })
    .to_string()
}
