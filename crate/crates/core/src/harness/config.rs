//! Sweep configuration: grids, tolerances and free constants, read from
//! `key = value` text and command-line overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{GeneralizedKernelSpec, LogForm, SlowlyVarying};
use crate::maximal::SteinEnvelope;
use crate::quadrature::QuadratureSpec;
use crate::special::ProblemParams;

/// Default number of points of an automatic grid.
pub const AUTO_GRID_POINTS: usize = 16;

/// Default relative tolerance of the sweeps.
pub const DEFAULT_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

/// Constants that the bounds leave unspecified. Every record echoes them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeConstants {
    /// `C_{1,d}` of the simplified upper bound.
    pub c1d: f64,
    /// Constant of the log-weighted envelope.
    pub thm4_c: f64,
    /// Override for the Stein constant `S(d)`; `2 · 5^d` when absent.
    pub stein_s: Option<f64>,
    /// `C_1` in `S(d) ≤ C_1 √d`.
    pub stein_c1: f64,
    /// `C_2` in `S(d) ≤ C_2`.
    pub stein_c2: f64,
}

impl Default for FreeConstants {
    fn default() -> Self {
        Self {
            c1d: 1.0,
            thm4_c: 1.0,
            stein_s: None,
            stein_c1: 1.0,
            stein_c2: 1.0,
        }
    }
}

impl FreeConstants {
    pub const NAMES: [&'static str; 5] = ["c1d", "thm4_c", "stein_s", "stein_c1", "stein_c2"];

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Config(format!("free constant {name} must be positive, got {value}")));
        }
        match name {
            "c1d" => self.c1d = value,
            "thm4_c" => self.thm4_c = value,
            "stein_s" => self.stein_s = Some(value),
            "stein_c1" => self.stein_c1 = value,
            "stein_c2" => self.stein_c2 = value,
            _ => {
                return Err(Error::Config(format!(
                    "unknown free constant {name:?} (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn stein(&self, d: u32) -> SteinEnvelope {
        let env = SteinEnvelope::new(d).with_sqrt_constant(self.stein_c1);
        match self.stein_s {
            Some(s) => env.with_value(s),
            None => env,
        }
    }

    /// Values echoed into every record, keyed `free.<name>`.
    pub fn echo(&self, d: u32) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("free.c1d".into(), self.c1d.to_string());
        m.insert("free.thm4_c".into(), self.thm4_c.to_string());
        m.insert("free.stein_s".into(), self.stein(d).value().to_string());
        m.insert("free.stein_c1".into(), self.stein_c1.to_string());
        m.insert("free.stein_c2".into(), self.stein_c2.to_string());
        m
    }
}

/// `n` points of the open interval `(lo, hi)` clustered geometrically
/// toward both ends.
pub fn auto_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let lower = n / 2;
    let upper = n - lower;
    let t = |i: usize, k: usize| 0.5 * 10f64.powf(-3.0 * (1.0 - i as f64 / k as f64));
    let mut pts: Vec<f64> = (0..lower).map(|i| lo + (hi - lo) * t(i, lower)).collect();
    pts.extend((0..upper).rev().map(|i| hi - (hi - lo) * t(i, upper)));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "points")]
pub enum Grid {
    Auto(usize),
    Explicit(Vec<f64>),
}

impl Grid {
    fn parse(value: &str) -> Result<Self> {
        let v = value.trim();
        if v == "auto" {
            return Ok(Grid::Auto(AUTO_GRID_POINTS));
        }
        if let Some(n) = v.strip_prefix("auto:") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Config(format!("bad grid size in {value:?}")))?;
            return Ok(Grid::Auto(n));
        }
        parse_list(v).map(Grid::Explicit)
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: expected a number, got {value:?}")))
}

fn parse_list(value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse_f64("grid", s)).collect()
}

fn parse_pairs(value: &str) -> Result<Vec<(f64, f64)>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|pair| {
            let (r, s) = pair
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("rs-grid entries look like r:s, got {pair:?}")))?;
            Ok((parse_f64("rs-grid", r)?, parse_f64("rs-grid", s)?))
        })
        .collect()
}

/// Everything a sweep needs. Build with [`SweepConfig::new`] and refine
/// with [`SweepConfig::apply`].
#[derive(Debug, Clone, Serialize)]
pub struct SweepConfig {
    pub params: ProblemParams,
    pub p_grid: Grid,
    /// `α` values of the conjecture probe; empty means the default grid.
    pub alpha_grid: Option<Vec<f64>>,
    /// `(r, s)` pairs of the truncated check; empty means the default pairs.
    pub rs_grid: Option<Vec<(f64, f64)>>,
    /// Radii of the Hedberg domination check.
    pub radii: Vec<f64>,
    pub rel_tol: f64,
    pub free_constants: FreeConstants,
    pub beta: f64,
    pub q: String,
    pub log_form: LogForm,
    pub seed: u64,
    pub format: ReportFormat,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(params: ProblemParams) -> Self {
        Self {
            params,
            p_grid: Grid::Auto(AUTO_GRID_POINTS),
            alpha_grid: None,
            rs_grid: None,
            radii: vec![0.1, 0.5, 1.0, 2.0, 5.0],
            rel_tol: DEFAULT_REL_TOL,
            free_constants: FreeConstants::default(),
            beta: 1.0,
            q: "one".into(),
            log_form: LogForm::PlainLog,
            seed: 0,
            format: ReportFormat::Json,
            output_path: None,
        }
    }

    /// Builds a config from `key = value` entries applied in order, so later
    /// entries override earlier ones. `d` and `alpha` default to 2 and 1.
    pub fn from_entries<'a>(entries: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let entries: Vec<(&str, &str)> = entries.into_iter().collect();
        let mut d = 2u32;
        let mut alpha = 1.0;
        for (k, v) in &entries {
            match *k {
                "d" => {
                    d = v
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("d: expected a positive integer, got {v:?}")))?
                }
                "alpha" => alpha = parse_f64("alpha", v)?,
                _ => {}
            }
        }
        let params = ProblemParams::new(d, alpha).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self::new(params);
        for (k, v) in entries {
            cfg.apply(k, v)?;
        }
        Ok(cfg)
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>> {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {line:?}", i + 1)))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d" | "alpha" => {}
            "p-grid" => self.p_grid = Grid::parse(value)?,
            "alpha-grid" => self.alpha_grid = Some(parse_list(value)?),
            "rs-grid" => self.rs_grid = Some(parse_pairs(value)?),
            "radii" => self.radii = parse_list(value)?,
            "rel-tol" => self.rel_tol = parse_f64(key, value)?,
            "free-const" => {
                let (name, v) = value
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("free-const expects name=value, got {value:?}")))?;
                self.free_constants.set(name.trim(), parse_f64(name, v)?)?;
            }
            "beta" => self.beta = parse_f64(key, value)?,
            "q" => {
                SlowlyVarying::from_label(value.trim())?;
                self.q = value.trim().to_string();
            }
            "log-form" => {
                self.log_form = match value.trim() {
                    "plain" => LogForm::PlainLog,
                    "shifted" => LogForm::ShiftedLog,
                    other => {
                        return Err(Error::Config(format!(
                            "log-form: expected plain or shifted, got {other:?}"
                        )))
                    }
                }
            }
            "seed" => {
                self.seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("seed: expected an integer, got {value:?}")))?
            }
            "format" => self.format = value.trim().parse()?,
            "out" => self.output_path = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::Config(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    pub fn quad(&self) -> Result<QuadratureSpec> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!("rel-tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        Ok(QuadratureSpec::default().with_rel_tol(self.rel_tol))
    }

    /// Grid inside the open interval `(lo, hi)`; explicit points outside it
    /// are a configuration error.
    pub fn grid_in(&self, lo: f64, hi: f64) -> Result<Vec<f64>> {
        let pts = match &self.p_grid {
            Grid::Auto(n) => auto_grid(lo, hi, *n),
            Grid::Explicit(v) => v.clone(),
        };
        if pts.is_empty() {
            return Err(Error::Config("p-grid is empty".into()));
        }
        if let Some(p) = pts.iter().find(|p| !(**p > lo && **p < hi)) {
            return Err(Error::Config(format!("p = {p} lies outside the open interval ({lo}, {hi})")));
        }
        Ok(pts)
    }

    /// `p` values for the norm validation: explicit points as given, the
    /// automatic grid on `(1, max(d/α, 4))`.
    pub fn norm_grid(&self) -> Result<Vec<f64>> {
        let pts = match &self.p_grid {
            Grid::Auto(n) => auto_grid(1.0, self.params.critical_p().max(4.0), *n),
            Grid::Explicit(v) => v.clone(),
        };
        if pts.is_empty() {
            return Err(Error::Config("p-grid is empty".into()));
        }
        if let Some(p) = pts.iter().find(|p| !(**p >= 1.0 && p.is_finite())) {
            return Err(Error::Config(format!("norm exponents must be finite and at least 1, got {p}")));
        }
        Ok(pts)
    }

    pub fn alpha_values(&self) -> Result<Vec<f64>> {
        let d = self.params.dim();
        let pts = match &self.alpha_grid {
            Some(v) => v.clone(),
            None => (1..)
                .map(|k| 0.25 * f64::from(k))
                .take_while(|a| *a < d)
                .collect(),
        };
        if pts.is_empty() {
            return Err(Error::Config("alpha-grid is empty".into()));
        }
        if let Some(a) = pts.iter().find(|a| !(**a > 0.0 && **a < d)) {
            return Err(Error::Config(format!("alpha = {a} lies outside (0, {d})")));
        }
        Ok(pts)
    }

    /// `(r, s)` pairs with `r, s ≥ 1` and `1 ≤ 1/r + 1/s < 1 + α/d`.
    pub fn rs_pairs(&self) -> Result<Vec<(f64, f64)>> {
        let ad = self.params.alpha() / self.params.dim();
        let pts = match &self.rs_grid {
            Some(v) => v.clone(),
            None => [(0.0, 0.0), (0.25, 0.0), (0.5, 0.1), (0.75, -0.1), (0.9, 0.05)]
                .iter()
                .map(|&(frac, skew)| {
                    let sigma = 1.0 + frac * ad;
                    let half = 0.5 * sigma;
                    let room = (1.0 - half).min(half);
                    let t = skew * room / 0.1 * 0.5;
                    (1.0 / (half + t), 1.0 / (half - t))
                })
                .collect(),
        };
        if pts.is_empty() {
            return Err(Error::Config("rs-grid is empty".into()));
        }
        for &(r, s) in &pts {
            crate::bounds::p_of_rs(r, s)?;
            let sigma = 1.0 / r + 1.0 / s;
            if sigma >= 1.0 + ad {
                return Err(Error::Domain(format!(
                    "1/r + 1/s < 1 + alpha/d violated at (r, s) = ({r}, {s}): 1/r + 1/s = {sigma}"
                )));
            }
        }
        Ok(pts)
    }

    pub fn kernel(&self) -> Result<GeneralizedKernelSpec> {
        let q = SlowlyVarying::from_label(&self.q)?;
        GeneralizedKernelSpec::new(self.params.alpha(), self.beta, q, self.log_form)
    }

    pub fn validate(&self) -> Result<()> {
        self.quad()?;
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be nonnegative, got {}", self.beta)));
        }
        if self.radii.is_empty() || self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::Config("radii must be a non-empty list of positive numbers".into()));
        }
        SlowlyVarying::from_label(&self.q)?;
        if let Grid::Auto(n) = self.p_grid {
            if n < 2 {
                return Err(Error::Config("automatic grids need at least 2 points".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_grid_clusters_at_both_ends() {
        let g = auto_grid(1.0, 2.0, 16);
        assert_eq!(g.len(), 16);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g[0] > 1.0 && g[0] < 1.001);
        assert!(g[15] < 2.0 && g[15] > 1.999);
        let g8 = auto_grid(1.0, 2.0, 8);
        assert_eq!(g8.len(), 8);
        assert_eq!(g8.iter().filter(|p| **p < 1.5).count(), 4);
    }

    #[test]
    fn entries_override_in_order() {
        let cfg = SweepConfig::from_entries([("d", "3"), ("alpha", "0.5"), ("p-grid", "1.5,2"), ("p-grid", "1.2")])
            .unwrap();
        assert_eq!(cfg.params.d(), 3);
        assert_eq!(cfg.p_grid, Grid::Explicit(vec![1.2]));
        let text = "# comment\nd = 2\nalpha = 1 # order\nfree-const = c1d=2.5\n";
        let entries = SweepConfig::parse_entries(text).unwrap();
        let cfg = SweepConfig::from_entries(entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))).unwrap();
        assert_eq!(cfg.free_constants.c1d, 2.5);
    }

    #[test]
    fn bad_entries_are_config_errors() {
        for (k, v) in [("p-grid", "1.5,x"), ("free-const", "nope=1"), ("format", "xml"), ("bogus", "1")] {
            let err = SweepConfig::from_entries([(k, v)]).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{k}: {err:?}");
        }
        assert!(matches!(SweepConfig::from_entries([("alpha", "3")]), Err(Error::Config(_))));
    }

    #[test]
    fn grids_are_checked() {
        let mut cfg = SweepConfig::new(ProblemParams::new(2, 1.0).unwrap());
        cfg.p_grid = Grid::Explicit(vec![]);
        assert!(matches!(cfg.grid_in(1.0, 2.0), Err(Error::Config(_))));
        cfg.p_grid = Grid::Explicit(vec![1.0, 1.5]);
        assert!(matches!(cfg.grid_in(1.0, 2.0), Err(Error::Config(_))));
        cfg.alpha_grid = Some(vec![]);
        assert!(matches!(cfg.alpha_values(), Err(Error::Config(_))));
        cfg.rs_grid = Some(vec![(2.0, 4.0)]);
        assert!(matches!(cfg.rs_pairs(), Err(Error::Domain(_))));
        cfg.rs_grid = None;
        let pairs = cfg.rs_pairs().unwrap();
        assert_eq!(pairs.len(), 5);
        for (r, s) in pairs {
            let sigma = 1.0 / r + 1.0 / s;
            assert!(r >= 1.0 && s >= 1.0 && (1.0 - 1e-15..1.5).contains(&sigma));
        }
    }
}
