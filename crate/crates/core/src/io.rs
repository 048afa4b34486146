//! File formats.
//!
//! Binned tables come in two CSV schemas, both UTF-8 with a header row:
//!
//! * `lower,upper,count` (or `percent` / `proportion` as the third column),
//!   one contiguous bin per row; an empty or `inf` upper limit on the last
//!   row marks an open-ended class.
//! * `threshold,cum_percent`, cumulative percentages at each threshold,
//!   starting with the lower limit at 0. The table closes either with a
//!   row at 100 or with an upper limit supplied by the caller.
//!
//! Outputs are CSV and JSON; floats are written in shortest round-trip form
//! so a write → read → write cycle is byte-stable.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{EstimatorReport, Method};
use crate::binned::{RawTable, WeightKind};
use crate::error::{Error, Result};
use crate::mics::SplineSample;
use crate::sim::{SimConfig, StudySummary};

/// A table as read from disk, before any upper limit is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum TableInput {
    Binned(RawTable),
    Cumulative { thresholds: Vec<f64>, cum_percent: Vec<f64> },
}

impl TableInput {
    /// Largest finite threshold below the terminal upper limit.
    pub fn last_finite_threshold(&self) -> f64 {
        match self {
            TableInput::Binned(raw) => raw.edges[raw.edges.len() - 2],
            TableInput::Cumulative { thresholds, cum_percent } => {
                if cum_percent.last() == Some(&100.0) && thresholds.len() > 1 {
                    thresholds[thresholds.len() - 2]
                } else {
                    *thresholds.last().unwrap()
                }
            }
        }
    }

    /// Raw table with the given upper limit replacing (or supplying) `τ_r`.
    pub fn to_raw(&self, upper: Option<f64>) -> Result<RawTable> {
        match self {
            TableInput::Cumulative { thresholds, cum_percent } => {
                RawTable::from_cumulative_percent(thresholds, cum_percent, upper)
            }
            TableInput::Binned(raw) => {
                let mut raw = raw.clone();
                if let Some(limit) = upper {
                    let bound = raw.edges[raw.edges.len() - 2];
                    if !(limit > bound) || !limit.is_finite() {
                        return Err(Error::UpperLimit { limit, bound });
                    }
                    *raw.edges.last_mut().unwrap() = limit;
                }
                Ok(raw)
            }
        }
    }
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), message: message.into() }
}

fn parse_number(path: &Path, line: usize, field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| parse_err(path, format!("line {line}: {field:?} is not a number")))
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_table(path: &Path) -> Result<TableInput> {
    parse_table(&read_to_string(path)?, path)
}

/// Parses either table schema; `origin` labels error messages.
pub fn parse_table(text: &str, origin: &Path) -> Result<TableInput> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.to_ascii_lowercase()).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = reader.records().collect::<std::result::Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err(parse_err(origin, "no data rows"));
    }
    match header.as_slice() {
        ["lower", "upper", kind] => {
            let kind = match *kind {
                "count" => WeightKind::Counts,
                "percent" => WeightKind::Percent,
                "proportion" => WeightKind::Proportions,
                other => return Err(parse_err(origin, format!("unknown frequency column {other:?}"))),
            };
            let mut edges = Vec::with_capacity(rows.len() + 1);
            let mut weights = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                let line = i + 2;
                if row.len() != 3 {
                    return Err(parse_err(origin, format!("line {line}: expected 3 fields")));
                }
                let lower = parse_number(origin, line, &row[0])?;
                let upper = match row[1].to_ascii_lowercase().as_str() {
                    "" | "inf" if i + 1 == rows.len() => f64::INFINITY,
                    s => parse_number(origin, line, s)?,
                };
                match edges.last() {
                    None => edges.push(lower),
                    Some(&prev) if prev == lower => {}
                    Some(&prev) => {
                        return Err(parse_err(
                            origin,
                            format!("line {line}: lower limit {lower} does not continue previous upper {prev}"),
                        ))
                    }
                }
                edges.push(upper);
                weights.push(parse_number(origin, line, &row[2])?);
            }
            Ok(TableInput::Binned(RawTable { edges, weights, kind }))
        }
        ["threshold", "cum_percent"] => {
            let mut thresholds = Vec::with_capacity(rows.len());
            let mut cum_percent = Vec::with_capacity(rows.len());
            for (i, row) in rows.iter().enumerate() {
                if row.len() != 2 {
                    return Err(parse_err(origin, format!("line {}: expected 2 fields", i + 2)));
                }
                thresholds.push(parse_number(origin, i + 2, &row[0])?);
                cum_percent.push(parse_number(origin, i + 2, &row[1])?);
            }
            Ok(TableInput::Cumulative { thresholds, cum_percent })
        }
        other => Err(parse_err(
            origin,
            format!("unrecognized header {other:?}; expected lower,upper,count or threshold,cum_percent"),
        )),
    }
}

/// CSV text with RFC 4180 quoting where needed.
pub fn csv_text<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// `tau,cdf,pdf` rows.
pub fn samples_csv(samples: &[SplineSample]) -> String {
    csv_text(
        &["tau", "cdf", "pdf"],
        samples.iter().map(|s| [s.tau.to_string(), s.cdf.to_string(), s.pdf.to_string()]),
    )
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One CSV row per (dataset, method); quantile columns follow the levels of
/// the first report.
pub fn reports_csv(rows: &[(String, EstimatorReport)]) -> String {
    let levels = rows.first().map(|(_, r)| r.levels.clone()).unwrap_or_default();
    let mut header = vec!["dataset".to_string(), "method".to_string()];
    header.extend(levels.iter().map(|l| format!("q{l}")));
    header.extend(["mean", "sd", "iqr", "bandwidth", "nominal_n"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_text(
        &header,
        rows.iter().map(|(dataset, r)| {
            let mut row = vec![dataset.clone(), r.method.to_string()];
            row.extend(r.quantiles.iter().map(f64::to_string));
            row.extend([
                r.mean.to_string(),
                r.sd.to_string(),
                r.iqr.to_string(),
                opt(r.meta.bandwidth),
                opt(r.meta.nominal_n),
            ]);
            row
        }),
    )
}

/// One line of the long-format study output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub distribution: String,
    pub n: usize,
    pub method: Method,
    pub metric: String,
    pub replicate: usize,
    pub delta: f64,
}

pub const STUDY_HEADER: &str = "distribution,n,method,metric,replicate,delta";

pub fn delta_rows(summary: &StudySummary) -> Vec<DeltaRow> {
    summary
        .cells
        .iter()
        .flat_map(|c| {
            c.deltas.iter().enumerate().map(move |(rep, &delta)| DeltaRow {
                distribution: c.distribution.clone(),
                n: c.n,
                method: c.method,
                metric: c.metric.clone(),
                replicate: rep,
                delta,
            })
        })
        .collect()
}

pub fn study_csv(rows: &[DeltaRow]) -> String {
    csv_text(
        &STUDY_HEADER.split(',').collect::<Vec<_>>(),
        rows.iter().map(|r| {
            [
                r.distribution.clone(),
                r.n.to_string(),
                r.method.to_string(),
                r.metric.clone(),
                r.replicate.to_string(),
                r.delta.to_string(),
            ]
        }),
    )
}

pub fn parse_study_csv(text: &str) -> Result<Vec<DeltaRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<&str> = reader.headers()?.iter().collect::<Vec<_>>();
    if header.join(",") != STUDY_HEADER {
        return Err(Error::Parse { path: PathBuf::from("<study>"), message: format!("bad header {header:?}") });
    }
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let bad = |what: &str| Error::Parse { path: PathBuf::from("<study>"), message: format!("bad {what} in {rec:?}") };
            Ok(DeltaRow {
                distribution: rec[0].to_string(),
                n: rec[1].parse().map_err(|_| bad("n"))?,
                method: rec[2].parse()?,
                metric: rec[3].to_string(),
                replicate: rec[4].parse().map_err(|_| bad("replicate"))?,
                delta: rec[5].parse().map_err(|_| bad("delta"))?,
            })
        })
        .collect()
}

pub fn summary_csv(summary: &StudySummary) -> String {
    csv_text(
        &["distribution", "n", "method", "metric", "min", "q1", "median", "q3", "max", "median_abs"],
        summary.cells.iter().map(|c| {
            let s = &c.summary;
            [
                c.distribution.clone(),
                c.n.to_string(),
                c.method.to_string(),
                c.metric.clone(),
                s.min.to_string(),
                s.q1.to_string(),
                s.median.to_string(),
                s.q3.to_string(),
                s.max.to_string(),
                c.median_abs.to_string(),
            ]
        }),
    )
}

/// Reads a study config from TOML, or JSON when the file ends in `.json`.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = read_to_string(path)?;
    parse_config(&text, path)
}

pub fn parse_config(text: &str, origin: &Path) -> Result<SimConfig> {
    let is_json = origin.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let config: SimConfig = if is_json {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.display())))?
    } else {
        toml::from_str(text).map_err(|e| Error::Config(format!("{}: {e}", origin.display())))?
    };
    config.validate()?;
    Ok(config)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: Option<String>,
    pub config: serde_json::Value,
    pub version: String,
    pub master_seed: Option<u64>,
    pub generator: Option<String>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<OutputEntry>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Writes artifacts into a directory and records them for the manifest.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    entries: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|source| Error::Io { path: root.to_path_buf(), source })?;
        Ok(Self { root: root.to_path_buf(), entries: Vec::new() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, contents).map_err(|source| Error::Io { path: path.clone(), source })?;
        self.entries.push(OutputEntry { file: name.to_string(), sha256: sha256_hex(contents.as_bytes()) });
        Ok(path)
    }

    /// JSON artifact tagged with the manifest that produced it.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut json = serde_json::to_value(value)?;
        let tagged = match json {
            serde_json::Value::Object(ref mut map) => {
                map.insert("manifest".into(), MANIFEST_FILE.into());
                json
            }
            other => serde_json::json!({ "manifest": MANIFEST_FILE, "data": other }),
        };
        let mut text = serde_json::to_string_pretty(&tagged)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf> {
        manifest.outputs = self.entries;
        manifest.finished_unix = unix_now();
        let path = self.root.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&path, text).map_err(|source| Error::Io { path: path.clone(), source })?;
        Ok(path)
    }
}
