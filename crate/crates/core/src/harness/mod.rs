//! Verification sweeps over the bounds, producing [`CheckRecord`]s and
//! machine-readable reports.

mod config;
mod report;
mod runs;

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use config::{auto_grid, FreeConstants, ReportFormat, SweepConfig};
pub use report::{emit_report, read_csv_records, render_report, Report, Summary, CSV_HEADER};
pub use runs::{
    run_all_checks, run_conjecture_probe, run_generalized_check, run_maximal_check, run_norm_validation,
    run_sandwich_report, run_sharp_probe, run_sharp_probe_with, run_truncated_check, run_witness_sweep,
    sharp_trial_profiles, witness_ratio, WitnessPoint,
};

/// Relative slack when both sides of an inequality come from quadrature.
pub const SLACK_QUADRATURE: f64 = 1e-3;
/// Relative slack when one side is a closed form.
pub const SLACK_CLOSED_FORM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ComputedLeBound,
    ComputedGeBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Divergent,
    RecordedOnly,
}

/// One checked (or recorded) inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub inputs: BTreeMap<String, String>,
    pub computed: f64,
    pub bound: f64,
    pub direction: Direction,
    pub slack_used: f64,
    pub status: Status,
    pub flags: Vec<String>,
    pub note: String,
}

impl CheckRecord {
    /// Checks `computed ≤ bound (1 + slack)` or `computed ≥ bound (1 - slack)`;
    /// a NaN on either side fails.
    pub fn compare(
        name: impl Into<String>,
        inputs: BTreeMap<String, String>,
        computed: f64,
        bound: f64,
        direction: Direction,
        slack: f64,
    ) -> Self {
        let margin = slack * bound.abs();
        let holds = match direction {
            Direction::ComputedLeBound => computed <= bound + margin,
            Direction::ComputedGeBound => computed >= bound - margin,
        };
        Self {
            name: name.into(),
            inputs,
            computed,
            bound,
            direction,
            slack_used: slack,
            status: if holds { Status::Pass } else { Status::Fail },
            flags: Vec::new(),
            note: String::new(),
        }
    }

    /// A value kept for the report without any assertion.
    pub fn recorded(name: impl Into<String>, inputs: BTreeMap<String, String>, computed: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            inputs,
            computed,
            bound,
            direction: Direction::ComputedLeBound,
            slack_used: 0.0,
            status: Status::RecordedOnly,
            flags: Vec::new(),
            note: String::new(),
        }
    }

    /// A check whose sub-computation failed. Divergences are reported as
    /// such; any other numerical failure is a fail.
    pub fn failed(
        name: impl Into<String>,
        inputs: BTreeMap<String, String>,
        direction: Direction,
        slack: f64,
        error: &crate::Error,
    ) -> Self {
        Self {
            name: name.into(),
            inputs,
            computed: f64::NAN,
            bound: f64::NAN,
            direction,
            slack_used: slack,
            status: if error.is_divergent() { Status::Divergent } else { Status::Fail },
            flags: Vec::new(),
            note: error.to_string(),
        }
    }

    pub fn with_flags<I, S>(mut self, flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        for f in flags {
            let f = f.into();
            if !self.flags.contains(&f) {
                self.flags.push(f);
            }
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Relative gap `(bound - computed) / |bound|`, positive when the
    /// directed inequality holds with room to spare.
    pub fn margin(&self) -> f64 {
        let gap = (self.bound - self.computed) / self.bound.abs();
        match self.direction {
            Direction::ComputedLeBound => gap,
            Direction::ComputedGeBound => -gap,
        }
    }
}

/// Builds an inputs map from `(key, value)` pairs.
pub fn inputs<I, K, V>(pairs: I) -> BTreeMap<String, String>
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: ToString,
{
    pairs.into_iter().map(|(k, v)| (k.into(), v.to_string())).collect()
}

/// A radial function with memoised values, shared across the exponents of
/// a sweep.
pub struct Memo<'a> {
    f: Box<dyn Fn(f64) -> Result<f64> + Send + Sync + 'a>,
    cache: Mutex<HashMap<u64, f64>>,
}

impl<'a> Memo<'a> {
    pub fn new(f: impl Fn(f64) -> Result<f64> + Send + Sync + 'a) -> Self {
        Self {
            f: Box::new(f),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let key = r.to_bits();
        if let Some(v) = self.cache.lock().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = (self.f)(r)?;
        self.cache.lock().expect("memo lock").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.cache.lock().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compare_applies_relative_slack() {
        let le = CheckRecord::compare("x", BTreeMap::new(), 1.0005, 1.0, Direction::ComputedLeBound, 1e-3);
        assert_eq!(le.status, Status::Pass);
        let le = CheckRecord::compare("x", BTreeMap::new(), 1.002, 1.0, Direction::ComputedLeBound, 1e-3);
        assert_eq!(le.status, Status::Fail);
        let ge = CheckRecord::compare("x", BTreeMap::new(), 0.9995, 1.0, Direction::ComputedGeBound, 1e-3);
        assert_eq!(ge.status, Status::Pass);
        let nan = CheckRecord::compare("x", BTreeMap::new(), f64::NAN, 1.0, Direction::ComputedGeBound, 1e-3);
        assert_eq!(nan.status, Status::Fail);
    }

    #[test]
    fn failures_are_never_passes() {
        let div = CheckRecord::failed(
            "x",
            BTreeMap::new(),
            Direction::ComputedLeBound,
            0.0,
            &crate::Error::Divergent("tail".into()),
        );
        assert_eq!(div.status, Status::Divergent);
        let acc = CheckRecord::failed(
            "x",
            BTreeMap::new(),
            Direction::ComputedLeBound,
            0.0,
            &crate::Error::Accuracy { best: 1.0, est_error: 1.0 },
        );
        assert_eq!(acc.status, Status::Fail);
    }

    #[test]
    fn memo_reuses_values() {
        let calls = std::sync::atomic::AtomicUsize::new(0);
        let m = Memo::new(|r| {
            calls.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            Ok(r * r)
        });
        assert_eq!(m.eval(3.0).unwrap(), 9.0);
        assert_eq!(m.eval(3.0).unwrap(), 9.0);
        assert_eq!(calls.load(std::sync::atomic::Ordering::SeqCst), 1);
        assert_eq!(m.len(), 1);
    }
}
