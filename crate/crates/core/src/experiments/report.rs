//! Experiment reports, verdict rules and their CSV/JSON persistence.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

/// Acceptance rule of one statistic. Thresholds live in the rule so a
/// verdict can be rechecked from the report alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum Rule {
    /// Pass if `p_value >= significance`.
    PValueAtLeast { significance: f64 },
    /// Pass if `value <= bound`.
    ValueAtMost { bound: f64 },
    /// Pass if `value < bound`.
    ValueBelow { bound: f64 },
    /// Pass if `|value| <= bound`.
    AbsAtMost { bound: f64 },
    /// Pass if `lo <= value <= hi`.
    InRange { lo: f64, hi: f64 },
    /// Reported only.
    Info,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pass => "pass",
            Self::Fail => "fail",
            Self::Info => "info",
        }
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Self::Pass),
            "fail" => Ok(Self::Fail),
            "info" => Ok(Self::Info),
            _ => Err(Error::Config(format!("unknown verdict `{s}`"))),
        }
    }
}

impl Rule {
    pub fn evaluate(&self, value: f64, p_value: Option<f64>) -> Verdict {
        let pass = match *self {
            Self::Info => return Verdict::Info,
            Self::PValueAtLeast { significance } => p_value.is_some_and(|p| p >= significance),
            Self::ValueAtMost { bound } => value <= bound,
            Self::ValueBelow { bound } => value < bound,
            Self::AbsAtMost { bound } => value.abs() <= bound,
            Self::InRange { lo, hi } => (lo..=hi).contains(&value),
        };
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// One statistic with its coordinates in the parameter grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub statistic_name: String,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,
    pub sample_size: usize,
    /// Reference law or null hypothesis, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    pub rule: Rule,
    pub verdict: Verdict,
}

impl StatEntry {
    pub fn new(
        statistic_name: impl Into<String>,
        value: f64,
        sample_size: usize,
        rule: Rule,
    ) -> Self {
        Self {
            n: None,
            r: None,
            c: None,
            m: None,
            statistic_name: statistic_name.into(),
            value,
            p_value: None,
            sample_size,
            law: None,
            rule,
            verdict: rule.evaluate(value, None),
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self.verdict = self.rule.evaluate(self.value, self.p_value);
        self
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn r(mut self, r: u32) -> Self {
        self.r = Some(r);
        self
    }

    pub fn c(mut self, c: u32) -> Self {
        self.c = Some(c);
        self
    }

    pub fn m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }

    pub fn law(mut self, law: impl Into<String>) -> Self {
        self.law = Some(law.into());
        self
    }

    /// Recomputes the verdict from the recorded value and rule.
    pub fn recheck(&self) -> Verdict {
        self.rule.evaluate(self.value, self.p_value)
    }
}

/// Plot-ready table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    pub replications: u64,
    /// Coupons drawn, summed over replications.
    pub total_draws: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: ExperimentConfig,
    pub statement: String,
    pub entries: Vec<StatEntry>,
    #[serde(default)]
    pub series: Vec<Series>,
    pub telemetry: Telemetry,
    /// Only recorded on request; it would break byte-level determinism.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict != Verdict::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &StatEntry> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fail)
    }
}

/// A set of experiment reports from one invocation.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub master_seed: u64,
    pub experiments: Vec<ExperimentReport>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.experiments.iter().all(ExperimentReport::passed)
    }

    pub fn experiment(&self, name: &str) -> Option<&ExperimentReport> {
        self.experiments.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn csv_rows(&self) -> Vec<CsvRow> {
        self.experiments
            .iter()
            .flat_map(|exp| {
                exp.entries.iter().map(move |e| CsvRow {
                    experiment: exp.name.clone(),
                    n: e.n,
                    r: e.r,
                    c: e.c,
                    m: e.m,
                    statistic_name: e.statistic_name.clone(),
                    value: e.value,
                    p_value: e.p_value,
                    sample_size: e.sample_size,
                    verdict: e.verdict,
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(Error::Config(format!(
                "unknown format `{s}`, expected csv or json"
            ))),
        }
    }
}

/// Flat CSV projection of a [`StatEntry`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub experiment: String,
    pub n: Option<usize>,
    pub r: Option<u32>,
    pub c: Option<u32>,
    pub m: Option<u32>,
    pub statistic_name: String,
    pub value: f64,
    pub p_value: Option<f64>,
    pub sample_size: usize,
    #[serde(with = "verdict_text")]
    pub verdict: Verdict,
}

mod verdict_text {
    use super::Verdict;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Verdict, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(v.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Verdict, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub const CSV_COLUMNS: [&str; 10] = [
    "experiment",
    "n",
    "r",
    "c",
    "m",
    "statistic_name",
    "value",
    "p_value",
    "sample_size",
    "verdict",
];

/// Path of the side file holding `series` of `experiment` next to `path`.
pub fn series_path(path: &Path, experiment: &str, series: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    let clean = |s: &str| -> String {
        s.chars()
            .map(|ch| {
                if ch.is_ascii_alphanumeric() || ch == '-' || ch == '_' {
                    ch
                } else {
                    '_'
                }
            })
            .collect()
    };
    path.with_file_name(format!(
        "{stem}.{}.{}.csv",
        clean(experiment),
        clean(series)
    ))
}

/// Writes `report` to `path`. CSV output also writes one side file per
/// series, see [`series_path`].
pub fn emit_report(report: &RunReport, format: Format, path: &Path) -> Result<()> {
    match format {
        Format::Json => {
            let mut out = BufWriter::new(File::create(path)?);
            out.write_all(report.to_json()?.as_bytes())?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
        Format::Csv => {
            write_csv(report, File::create(path)?)?;
            for exp in &report.experiments {
                for s in &exp.series {
                    write_series(s, File::create(series_path(path, &exp.name, &s.name))?)?;
                }
            }
        }
    }
    Ok(())
}

pub fn write_csv(report: &RunReport, out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for row in report.csv_rows() {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series(series: &Series, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&series.columns)?;
    for row in &series.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<RunReport> {
    RunReport::from_json(&std::fs::read_to_string(path)?)
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_COLUMNS {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

pub fn read_series(path: &Path, name: &str) -> Result<Series> {
    let mut r = csv::Reader::from_path(path)?;
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| {
            rec?.iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad number `{v}`: {e}")))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(Series {
        name: name.to_string(),
        columns,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_evaluate() {
        let p = Rule::PValueAtLeast { significance: 0.01 };
        assert_eq!(p.evaluate(3.0, Some(0.5)), Verdict::Pass);
        assert_eq!(p.evaluate(3.0, Some(0.001)), Verdict::Fail);
        assert_eq!(p.evaluate(3.0, None), Verdict::Fail);
        assert_eq!(
            Rule::ValueAtMost { bound: 1.0 }.evaluate(1.0, None),
            Verdict::Pass
        );
        assert_eq!(
            Rule::ValueBelow { bound: 1.0 }.evaluate(1.0, None),
            Verdict::Fail
        );
        assert_eq!(
            Rule::AbsAtMost { bound: 3.0 }.evaluate(-2.0, None),
            Verdict::Pass
        );
        assert_eq!(
            Rule::InRange { lo: 0.0, hi: 0.1 }.evaluate(0.11, None),
            Verdict::Fail
        );
        assert_eq!(Rule::Info.evaluate(f64::MAX, None), Verdict::Info);
    }

    #[test]
    fn entry_verdict_tracks_p_value() {
        let e = StatEntry::new("ks", 0.1, 10, Rule::PValueAtLeast { significance: 0.05 });
        assert_eq!(e.verdict, Verdict::Fail);
        let e = e.with_p(0.2);
        assert_eq!(e.verdict, Verdict::Pass);
        assert_eq!(e.recheck(), e.verdict);
    }

    #[test]
    fn empty_report_gives_header_only_csv() {
        let mut buf = Vec::new();
        write_csv(&RunReport::default(), &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            CSV_COLUMNS.join(",") + "\n"
        );
    }

    #[test]
    fn series_paths_sit_next_to_report() {
        let p = series_path(Path::new("/tmp/out/run.csv"), "rare path", "mean r=1");
        assert_eq!(p, Path::new("/tmp/out/run.rare_path.mean_r_1.csv"));
    }
}
