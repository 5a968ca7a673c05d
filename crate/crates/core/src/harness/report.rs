//! JSON and CSV reports. Output is byte-stable for identical inputs and is
//! written through a temporary file, so a failed write leaves nothing behind.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{ReportFormat, SweepConfig};
use super::{CheckRecord, Direction, Status};
use crate::error::{Error, Result};

/// Column order of CSV reports. `inputs` is `key=value` joined by `;`,
/// `flags` is joined by `;`.
pub const CSV_HEADER: &str = "name,status,direction,computed,bound,slack_used,inputs,flags,note";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub divergent: usize,
    pub recorded_only: usize,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Self {
        let mut s = Summary::default();
        for r in records {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::Divergent => s.divergent += 1,
                Status::RecordedOnly => s.recorded_only += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.divergent + self.recorded_only
    }
}

#[derive(Debug, Clone, Serialize)]
struct ParamsEcho {
    d: u32,
    alpha: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<'a> {
    params: ParamsEcho,
    config: &'a SweepConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl<'a> Report<'a> {
    pub fn new(config: &'a SweepConfig, records: Vec<CheckRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::Config("a report needs at least one record".into()));
        }
        Ok(Self {
            params: ParamsEcho {
                d: config.params.d(),
                alpha: config.params.alpha(),
            },
            config,
            summary: Summary::of(&records),
            records,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    name: String,
    status: Status,
    direction: Direction,
    computed: f64,
    bound: f64,
    slack_used: f64,
    inputs: String,
    flags: String,
    note: String,
}

fn join_inputs(inputs: &BTreeMap<String, String>) -> String {
    inputs
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn split_inputs(s: &str) -> Result<BTreeMap<String, String>> {
    if s.is_empty() {
        return Ok(BTreeMap::new());
    }
    s.split(';')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| Error::Config(format!("malformed inputs entry {kv:?}")))
        })
        .collect()
}

/// Report text in the requested format.
pub fn render_report(report: &Report<'_>, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
            for r in &report.records {
                w.serialize(CsvRow {
                    name: r.name.clone(),
                    status: r.status,
                    direction: r.direction,
                    computed: r.computed,
                    bound: r.bound,
                    slack_used: r.slack_used,
                    inputs: join_inputs(&r.inputs),
                    flags: r.flags.join(";"),
                    note: r.note.clone(),
                })
                .map_err(|e| Error::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

/// Writes the report to `path` atomically.
pub fn emit_report(report: &Report<'_>, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render_report(report, format)?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

/// Parses a CSV report back into records.
pub fn read_csv_records(text: &str) -> Result<Vec<CheckRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::Config(format!("unexpected CSV header {:?}", header.join(","))));
    }
    rdr.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(|e| Error::Config(e.to_string()))?;
            Ok(CheckRecord {
                name: row.name,
                inputs: split_inputs(&row.inputs)?,
                computed: row.computed,
                bound: row.bound,
                direction: row.direction,
                slack_used: row.slack_used,
                status: row.status,
                flags: if row.flags.is_empty() {
                    Vec::new()
                } else {
                    row.flags.split(';').map(str::to_string).collect()
                },
                note: row.note,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::inputs;
    use crate::special::ProblemParams;

    fn sample() -> Vec<CheckRecord> {
        vec![
            CheckRecord::compare("a", inputs([("p", 1.5)]), 1.0, 2.0, Direction::ComputedLeBound, 1e-6),
            CheckRecord::recorded("b", inputs([("p", "1.25"), ("q", "4")]), 0.5, f64::NAN).with_flags(["x", "y"]),
            CheckRecord::failed(
                "c",
                BTreeMap::new(),
                Direction::ComputedGeBound,
                1e-3,
                &Error::Divergent("tail, with comma".into()),
            ),
        ]
    }

    #[test]
    fn json_summary_counts_records() {
        let cfg = SweepConfig::new(ProblemParams::new(2, 1.0).unwrap());
        let report = Report::new(&cfg, sample()).unwrap();
        assert_eq!(report.summary.total(), 3);
        let text = render_report(&report, ReportFormat::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let s = &v["summary"];
        let sum: u64 = ["pass", "fail", "divergent", "recorded_only"]
            .iter()
            .map(|k| s[k].as_u64().unwrap())
            .sum();
        assert_eq!(sum, 3);
        assert_eq!(v["records"].as_array().unwrap().len(), 3);
        assert_eq!(v["params"]["d"], 2);
    }

    #[test]
    fn csv_round_trips() {
        let cfg = SweepConfig::new(ProblemParams::new(2, 1.0).unwrap());
        let records = sample();
        let report = Report::new(&cfg, records.clone()).unwrap();
        let text = render_report(&report, ReportFormat::Csv).unwrap();
        assert!(text.starts_with(CSV_HEADER));
        let back = read_csv_records(&text).unwrap();
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.inputs, b.inputs);
            assert_eq!(a.status, b.status);
            assert_eq!(a.direction, b.direction);
            assert_eq!(a.flags, b.flags);
            assert_eq!(a.note, b.note);
            assert!(a.computed.to_bits() == b.computed.to_bits() || (a.computed.is_nan() && b.computed.is_nan()));
            assert!(a.bound.to_bits() == b.bound.to_bits() || (a.bound.is_nan() && b.bound.is_nan()));
            assert_eq!(a.slack_used, b.slack_used);
        }
    }

    #[test]
    fn empty_reports_are_rejected() {
        let cfg = SweepConfig::new(ProblemParams::new(2, 1.0).unwrap());
        assert!(matches!(Report::new(&cfg, vec![]), Err(Error::Config(_))));
    }

    #[test]
    fn unwritable_path_leaves_no_file() {
        let cfg = SweepConfig::new(ProblemParams::new(2, 1.0).unwrap());
        let report = Report::new(&cfg, sample()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.json");
        let err = emit_report(&report, ReportFormat::Json, &path).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
        assert!(!path.exists());
        let ok = dir.path().join("out.json");
        emit_report(&report, ReportFormat::Json, &ok).unwrap();
        let first = std::fs::read(&ok).unwrap();
        emit_report(&report, ReportFormat::Json, &ok).unwrap();
        assert_eq!(first, std::fs::read(&ok).unwrap());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
