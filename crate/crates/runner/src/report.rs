//! Aggregate one or more result CSVs.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{config, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantitySummary {
    pub rows: usize,
    pub failures: usize,
    pub max_rel_deviation: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportSummary {
    /// Keyed by `(scenario, quantity)`.
    pub quantities: BTreeMap<(String, String), QuantitySummary>,
    pub rows: usize,
    pub failures: usize,
}

impl ReportSummary {
    pub fn all_passed(&self) -> bool {
        self.failures == 0
    }

    pub fn add_csv(&mut self, path: &Path) -> Result<()> {
        let mut reader = csv::Reader::from_path(path)?;
        let headers = reader.headers()?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| config(format!("{}: no `{name}` column", path.display())))
        };
        let (scenario, quantity) = (column("scenario")?, column("quantity")?);
        let (deviation, passed) = (column("rel_deviation")?, column("passed")?);
        for row in reader.records() {
            let row = row?;
            let key = (row[scenario].to_string(), row[quantity].to_string());
            let entry = self.quantities.entry(key).or_default();
            entry.rows += 1;
            self.rows += 1;
            if &row[passed] != "true" {
                entry.failures += 1;
                self.failures += 1;
            }
            if !row[deviation].is_empty() {
                let d: f64 = row[deviation].parse().map_err(|_| {
                    config(format!(
                        "{}: bad rel_deviation `{}`",
                        path.display(),
                        &row[deviation]
                    ))
                })?;
                entry.max_rel_deviation = Some(entry.max_rel_deviation.map_or(d, |m: f64| m.max(d)));
            }
        }
        Ok(())
    }
}

pub fn summarize<P: AsRef<Path>>(paths: &[P]) -> Result<ReportSummary> {
    let mut summary = ReportSummary::default();
    for p in paths {
        summary.add_csv(p.as_ref())?;
    }
    Ok(summary)
}

impl fmt::Display for ReportSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<18} {:<26} {:>6} {:>8} {:>14}",
            "scenario", "quantity", "rows", "failed", "max_rel_dev"
        )?;
        for ((scenario, quantity), q) in &self.quantities {
            let dev = q
                .max_rel_deviation
                .map(|d| format!("{d:.3e}"))
                .unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{scenario:<18} {quantity:<26} {:>6} {:>8} {dev:>14}",
                q.rows, q.failures
            )?;
        }
        write!(f, "{} rows, {} failed", self.rows, self.failures)
    }
}
