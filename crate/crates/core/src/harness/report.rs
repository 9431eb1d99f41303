//! `report.csv` / `report.json` writing, parsing and self-consistency checks.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::ExperimentConfig;
use super::float_repr;
use super::stats::{success_rate, Summary};
use super::{BaselineKind, TrialResult};
use crate::error::{Error, Result};
use crate::instances::{GeneratedInstance, InstanceMetadata};
use crate::rng::GENERATOR_NAME;

pub const REPORT_HEADER: [&str; 12] = [
    "trial_id",
    "seed",
    "n",
    "k",
    "algorithm",
    "order",
    "centers_taken",
    "alg_cost",
    "baseline_cost",
    "baseline_kind",
    "ratio",
    "runtime_ms",
];

pub const CSV_FILE: &str = "report.csv";
pub const JSON_FILE: &str = "report.json";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessPoint {
    #[serde(with = "float_repr")]
    pub a: f64,
    #[serde(with = "float_repr")]
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    pub centers_taken: Summary,
    pub ratio: Summary,
    pub success_rates: Vec<SuccessPoint>,
}

impl Aggregates {
    pub fn from_rows(rows: &[TrialResult], thresholds: &[f64]) -> Aggregates {
        let centers: Vec<f64> = rows.iter().map(|r| r.centers_taken as f64).collect();
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        Aggregates {
            trials: rows.len(),
            centers_taken: Summary::of(&centers),
            ratio: Summary::of(&ratios),
            success_rates: thresholds
                .iter()
                .map(|&a| SuccessPoint {
                    a,
                    rate: success_rate(&ratios, a),
                })
                .collect(),
        }
    }

    /// `success_rate(a)` if `a` is one of the reported thresholds.
    pub fn success_rate(&self, a: f64) -> Option<f64> {
        self.success_rates.iter().find(|p| p.a == a).map(|p| p.rate)
    }

    fn floats(&self) -> Vec<f64> {
        let mut v = Vec::new();
        for s in [&self.centers_taken, &self.ratio] {
            v.extend([s.mean, s.median, s.p90, s.p99, s.min, s.max]);
        }
        for p in &self.success_rates {
            v.extend([p.a, p.rate]);
        }
        v
    }

    /// Bit-for-bit equality (NaN matches NaN).
    pub fn identical(&self, other: &Aggregates) -> bool {
        let (a, b) = (self.floats(), other.floats());
        self.trials == other.trials
            && a.len() == b.len()
            && a.iter()
                .zip(&b)
                .all(|(x, y)| x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()))
    }
}

/// Rows plus the JSON summary. Only the summary goes to `report.json`; rows
/// go to `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: Value,
    pub rng_generator: String,
    pub instance: InstanceMetadata,
    pub aggregates: Aggregates,
    #[serde(skip)]
    pub rows: Vec<TrialResult>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig, instance: &GeneratedInstance, rows: Vec<TrialResult>) -> Self {
        ExperimentReport {
            config: config.to_json_value(),
            rng_generator: GENERATOR_NAME.to_string(),
            instance: instance.metadata.clone(),
            aggregates: Aggregates::from_rows(&rows, &config.success_thresholds),
            rows,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Writes `report.csv` and `report.json` into `dir`, creating it.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(CSV_FILE), self.to_csv()?)?;
        std::fs::write(dir.join(JSON_FILE), self.to_json() + "\n")?;
        Ok(())
    }

    /// Recomputes aggregates from the rows and compares them bit-for-bit.
    pub fn check_consistency(&self) -> Result<()> {
        let thresholds: Vec<f64> = self.aggregates.success_rates.iter().map(|p| p.a).collect();
        let again = Aggregates::from_rows(&self.rows, &thresholds);
        if again.identical(&self.aggregates) {
            Ok(())
        } else {
            Err(Error::InconsistentReport(format!(
                "stored aggregates {:?} differ from recomputed {:?}",
                self.aggregates, again
            )))
        }
    }
}

fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        float_repr::to_str(v).to_string()
    }
}

fn parse_float(s: &str) -> Option<f64> {
    float_repr::from_str(s).or_else(|| s.parse::<f64>().ok().filter(|v| v.is_finite()))
}

pub fn rows_to_csv(rows: &[TrialResult]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(REPORT_HEADER)?;
    for r in rows {
        w.write_record([
            r.trial_id.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.algorithm.clone(),
            r.order.clone(),
            r.centers_taken.to_string(),
            fmt_float(r.alg_cost),
            fmt_float(r.baseline_cost),
            r.baseline_kind.as_str().to_string(),
            fmt_float(r.ratio),
            fmt_float(r.runtime_ms),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields is utf-8"))
}

/// Parses `report.csv` text. The header must match [`REPORT_HEADER`].
pub fn parse_rows(text: &str) -> Result<Vec<TrialResult>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    let header = match records.next() {
        Some(h) => h?,
        None => {
            return Err(Error::Parse {
                line: 0,
                message: "empty report".into(),
            })
        }
    };
    if !header.iter().eq(REPORT_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: format!("header must be `{}`", REPORT_HEADER.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |what: &str| Error::Parse {
            line,
            message: format!("bad {what}"),
        };
        if rec.len() != REPORT_HEADER.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, got {}", REPORT_HEADER.len(), rec.len()),
            });
        }
        let int = |i: usize| rec[i].parse::<u64>().map_err(|_| bad(REPORT_HEADER[i]));
        let float = |i: usize| parse_float(&rec[i]).ok_or_else(|| bad(REPORT_HEADER[i]));
        let size = |i: usize| rec[i].parse::<usize>().map_err(|_| bad(REPORT_HEADER[i]));
        rows.push(TrialResult {
            trial_id: int(0)?,
            seed: int(1)?,
            n: size(2)?,
            k: size(3)?,
            algorithm: rec[4].to_string(),
            order: rec[5].to_string(),
            centers_taken: size(6)?,
            alg_cost: float(7)?,
            baseline_cost: float(8)?,
            baseline_kind: BaselineKind::parse(&rec[9]).ok_or_else(|| bad("baseline_kind"))?,
            ratio: float(10)?,
            runtime_ms: float(11)?,
        });
    }
    Ok(rows)
}

/// Reads a report directory and verifies its aggregates against its rows.
pub fn load_report(dir: impl AsRef<Path>) -> Result<ExperimentReport> {
    let dir = dir.as_ref();
    let mut report: ExperimentReport = serde_json::from_str(&std::fs::read_to_string(dir.join(JSON_FILE))?)?;
    report.rows = parse_rows(&std::fs::read_to_string(dir.join(CSV_FILE))?)?;
    report.check_consistency()?;
    Ok(report)
}
