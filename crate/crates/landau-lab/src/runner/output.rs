use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One audited quantity. `threshold` is `None` for values that are reported
/// without a pass/fail bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub passed: bool,
}

impl Metric {
    /// Passes when `value ≤ threshold` (NaN fails).
    pub fn at_most(value: f64, threshold: f64) -> Self {
        Self { value: finite(value), threshold: Some(threshold), passed: value <= threshold }
    }

    /// Passes when `value ≥ threshold` (NaN fails).
    pub fn at_least(value: f64, threshold: f64) -> Self {
        Self { value: finite(value), threshold: Some(threshold), passed: value >= threshold }
    }

    pub fn report(value: f64) -> Self {
        Self { value: finite(value), threshold: None, passed: true }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub metrics: BTreeMap<String, Metric>,
    /// Elapsed seconds; the only field that varies between identical runs.
    pub wallclock: f64,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.metrics.values().all(|m| m.passed)
    }
}

/// A CSV file: exact header plus rows of preformatted cells.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &'static [&'static str]) -> Self {
        Self { file, header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join(self.file))?;
        w.write_record(self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        Table::new("decay.csv", &["t", "q", "norm", "envelope", "ratio"]).write(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("decay.csv")).unwrap(), "t,q,norm,envelope,ratio\n");
    }

    #[test]
    fn metric_verdicts() {
        assert!(Metric::at_most(1.0, 1.0).passed);
        assert!(!Metric::at_most(f64::NAN, 1.0).passed);
        assert_eq!(Metric::at_most(f64::NAN, 1.0).value, None);
        assert!(Metric::at_least(2.0, 1.0).passed);
        assert!(Metric::report(3.0).threshold.is_none());
    }
}
