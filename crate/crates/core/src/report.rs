//! Flat key-value reports with pass/fail bookkeeping.
//!
//! Keys keep insertion order and floats are written with 17 significant
//! digits, so equal runs give byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::grid::NormPair;
use crate::tolerances::ROUNDOFF_FLOOR;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Skipped(String),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Float(v) => write!(f, "{v:.16e}"),
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(s) => write!(f, "{s}"),
            Value::Skipped(reason) => write!(f, "skipped ({reason})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
    failures: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// Keys of failed checks, in the order they were made.
    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Value) {
        self.entries.push((key.into(), value));
    }

    pub fn float(&mut self, key: impl Into<String>, v: f64) {
        self.push(key, Value::Float(v));
    }

    pub fn int(&mut self, key: impl Into<String>, v: i64) {
        self.push(key, Value::Int(v));
    }

    pub fn text(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.push(key, Value::Text(v.into()));
    }

    pub fn skipped(&mut self, key: impl Into<String>, reason: impl Into<String>) {
        self.push(key, Value::Skipped(reason.into()));
    }

    /// `key.max` and `key.rms`.
    pub fn norm(&mut self, key: &str, n: NormPair) {
        self.float(format!("{key}.max"), n.max);
        self.float(format!("{key}.rms"), n.rms);
    }

    /// Records an externally decided outcome as `key.pass`.
    pub fn outcome(&mut self, key: &str, pass: bool) -> bool {
        self.push(format!("{key}.pass"), Value::Bool(pass));
        if !pass {
            self.failures.push(key.to_string());
        }
        pass
    }

    /// `value <= limit` (NaN fails).
    pub fn check_max(&mut self, key: &str, value: f64, limit: f64) -> bool {
        self.float(key, value);
        self.float(format!("{key}.limit"), limit);
        self.outcome(key, value <= limit)
    }

    /// `value >= floor` (NaN fails).
    pub fn check_min(&mut self, key: &str, value: f64, floor: f64) -> bool {
        self.float(key, value);
        self.float(format!("{key}.floor"), floor);
        self.outcome(key, value >= floor)
    }

    pub fn check_range(&mut self, key: &str, value: f64, (lo, hi): (f64, f64)) -> bool {
        self.float(key, value);
        self.float(format!("{key}.lo"), lo);
        self.float(format!("{key}.hi"), hi);
        self.outcome(key, (lo..=hi).contains(&value))
    }

    /// Errors on successively halved grids. Each reduction must lie in
    /// `range` unless the finer value is already at roundoff.
    pub fn check_refinement(&mut self, key: &str, series: &[(usize, f64)], range: (f64, f64)) -> bool {
        let mut pass = series.len() >= 2;
        for &(n, v) in series {
            self.float(format!("{key}.n{n}"), v);
        }
        for w in series.windows(2) {
            let (coarse, fine) = (w[0].1, w[1].1);
            let ratio = coarse / fine;
            self.float(format!("{key}.ratio_n{}", w[1].0), ratio);
            let ok = (range.0..=range.1).contains(&ratio) || fine <= ROUNDOFF_FLOOR;
            pass &= ok;
        }
        self.outcome(key, pass)
    }

    /// Appends every entry of `other` under `prefix.`.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for (k, v) in other.entries {
            self.entries.push((format!("{prefix}.{k}"), v));
        }
        for k in other.failures {
            self.failures.push(format!("{prefix}.{k}"));
        }
    }

    /// The document body followed by the summary lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "summary.pass = {}", self.passed());
        let _ = writeln!(out, "summary.failures = {}", self.failures.join(","));
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    /// Process exit code: 0 when every check passed.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_and_skips() {
        let mut r = Report::new();
        r.check_max("gauss", 1e-12, 1e-10);
        r.skipped("energy", "no lambda0 requested");
        assert_eq!(r.exit_code(), 0);
        assert!(r.render().contains("energy = skipped (no lambda0 requested)"));
        r.check_max("det", 1e-3, 1e-9);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures(), ["det"]);
        assert!(r.render().contains("summary.failures = det\n"));
    }

    #[test]
    fn floats_have_seventeen_digits() {
        let mut r = Report::new();
        r.float("x", 0.1);
        assert_eq!(r.render().lines().next(), Some("x = 1.0000000000000001e-1"));
    }

    #[test]
    fn refinement_accepts_roundoff() {
        let mut r = Report::new();
        assert!(r.check_refinement("a", &[(33, 4e-2), (65, 1e-2), (129, 2.6e-3)], (3.0, 5.0)));
        assert!(r.check_refinement("b", &[(33, 3e-15), (65, 7e-15)], (3.0, 5.0)));
        assert!(!r.check_refinement("c", &[(33, 4e-2), (65, 2e-2)], (3.0, 5.0)));
    }
}
