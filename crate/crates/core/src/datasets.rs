//! Bundled tables.
//!
//! * Monthly punctuality of Deutsche Bahn trains in 2022:
//!   cumulative percent of stops reached within 6 and 16 minutes of the
//!   timetable, for passenger (`PT`), long-distance (`LT`) and regional
//!   (`RT`) trains. The published thresholds are 5:59 and 15:59 minutes.
//! * German micro-census 2020 commuting tables: percent of workers by
//!   distance (km) and travel time (min) to work, for all workers, the
//!   self-employed and employees.

use std::path::Path;

use crate::binned::{validate_table, BinnedTable, RawTable};
use crate::error::{Error, Result};
use crate::io::{parse_table, TableInput};

/// `(file name, contents)` of every bundled CSV.
pub const FILES: [(&str, &str); 10] = [
    ("db_delays_2022.csv", include_str!("../data/db_delays_2022.csv")),
    ("db_lt_jan.csv", include_str!("../data/db_lt_jan.csv")),
    ("db_lt_jul.csv", include_str!("../data/db_lt_jul.csv")),
    ("distance_all.csv", include_str!("../data/distance_all.csv")),
    ("distance_se.csv", include_str!("../data/distance_se.csv")),
    ("distance_em.csv", include_str!("../data/distance_em.csv")),
    ("time_all.csv", include_str!("../data/time_all.csv")),
    ("time_se.csv", include_str!("../data/time_se.csv")),
    ("time_em.csv", include_str!("../data/time_em.csv")),
    ("study_defaults.toml", include_str!("../data/study_defaults.toml")),
];

/// Encoded delay thresholds in minutes.
pub const DELAY_THRESHOLDS: [f64; 2] = [6.0, 16.0];

/// Upper limit on delays used in the published analysis, in minutes.
pub const DEFAULT_DELAY_LIMIT: f64 = 180.0;

/// Pseudo node placed beyond the delay limit.
pub const DELAY_PSEUDO_NODE: (f64, f64) = (300.0, 1.0);

pub const MONTHS: [&str; 12] =
    ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainCategory {
    Passenger,
    LongDistance,
    Regional,
}

impl TrainCategory {
    pub fn code(self) -> &'static str {
        match self {
            TrainCategory::Passenger => "PT",
            TrainCategory::LongDistance => "LT",
            TrainCategory::Regional => "RT",
        }
    }
}

/// One row of the delay table, in cumulative percent.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayRecord {
    pub month: String,
    pub category: String,
    pub within_6: f64,
    pub within_16: f64,
}

pub fn file(name: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

pub fn delay_records() -> Vec<DelayRecord> {
    let mut reader = csv::Reader::from_reader(FILES[0].1.as_bytes());
    reader
        .records()
        .map(|r| {
            let r = r.expect("bundled delay table");
            DelayRecord {
                month: r[0].to_string(),
                category: r[1].to_string(),
                within_6: r[2].parse().expect("bundled number"),
                within_16: r[3].parse().expect("bundled number"),
            }
        })
        .collect()
}

fn delay_record(month: &str, category: TrainCategory) -> Result<DelayRecord> {
    delay_records()
        .into_iter()
        .find(|r| r.month.eq_ignore_ascii_case(month) && r.category == category.code())
        .ok_or_else(|| Error::InvalidParameter(format!("no delay record for {month} {}", category.code())))
}

/// Cumulative-percent input for one month and category, not yet closed.
pub fn delay_input(month: &str, category: TrainCategory) -> Result<TableInput> {
    let r = delay_record(month, category)?;
    Ok(TableInput::Cumulative {
        thresholds: vec![0.0, DELAY_THRESHOLDS[0], DELAY_THRESHOLDS[1]],
        cum_percent: vec![0.0, r.within_6, r.within_16],
    })
}

/// Delay table closed at `upper` minutes.
pub fn delay_table(month: &str, category: TrainCategory, upper: f64) -> Result<BinnedTable> {
    validate_table(delay_input(month, category)?.to_raw(Some(upper))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Commute {
    Distance,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    All,
    SelfEmployed,
    Employees,
}

pub fn commute_raw(measure: Commute, group: Workers) -> RawTable {
    let name = match (measure, group) {
        (Commute::Distance, Workers::All) => "distance_all.csv",
        (Commute::Distance, Workers::SelfEmployed) => "distance_se.csv",
        (Commute::Distance, Workers::Employees) => "distance_em.csv",
        (Commute::Time, Workers::All) => "time_all.csv",
        (Commute::Time, Workers::SelfEmployed) => "time_se.csv",
        (Commute::Time, Workers::Employees) => "time_em.csv",
    };
    match parse_table(file(name).expect("bundled file"), Path::new(name)) {
        Ok(TableInput::Binned(raw)) => raw,
        other => panic!("bundled {name} is malformed: {other:?}"),
    }
}

pub fn commute_table(measure: Commute, group: Workers) -> Result<BinnedTable> {
    validate_table(commute_raw(measure, group))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::sha256_hex;

    #[test]
    fn digests_are_pinned() {
        let pinned = include_str!("../data/SHA256SUMS");
        for (name, contents) in FILES {
            let line = format!("{}  {name}", sha256_hex(contents.as_bytes()));
            assert!(pinned.lines().any(|l| l == line), "digest mismatch for {name}");
        }
    }

    #[test]
    fn all_months_present() {
        let records = delay_records();
        assert_eq!(records.len(), 36);
        for m in MONTHS {
            for c in [TrainCategory::Passenger, TrainCategory::LongDistance, TrainCategory::Regional] {
                let r = delay_record(m, c).unwrap();
                assert!(0.0 < r.within_6 && r.within_6 <= r.within_16 && r.within_16 <= 100.0);
            }
        }
    }

    #[test]
    fn january_long_distance() {
        let t = delay_table("Jan", TrainCategory::LongDistance, 180.0).unwrap();
        assert_eq!(t.edges(), &[0.0, 6.0, 16.0, 180.0]);
        let c = t.cumulative();
        assert!((c[1] - 0.809).abs() < 1e-12 && (c[2] - 0.922).abs() < 1e-12);
    }

    #[test]
    fn commute_tables_validate() {
        for m in [Commute::Distance, Commute::Time] {
            for g in [Workers::All, Workers::SelfEmployed, Workers::Employees] {
                let bins = if m == Commute::Distance { 5 } else { 4 };
                assert_eq!(commute_table(m, g).unwrap().bins(), bins);
            }
        }
    }
}
