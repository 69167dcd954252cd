//! One CSV row per computed quantity.

use std::io::Write;
use std::path::Path;

use abphase::QuadResult;

use crate::config::ScenarioKind;
use crate::error::Result;

/// Columns written before the parameter echo.
pub const LEAD_COLUMNS: [&str; 2] = ["scenario", "quantity"];
/// Columns written after the parameter echo.
pub const TRAIL_COLUMNS: [&str; 8] = [
    "value",
    "error_estimate",
    "expected",
    "rel_deviation",
    "tolerance",
    "converged",
    "passed",
    "wall_ms",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: ScenarioKind,
    pub quantity: String,
    /// Parameter values this row was computed with, in column order.
    pub inputs: Vec<(String, f64)>,
    pub value: f64,
    pub error_estimate: f64,
    pub expected: Option<f64>,
    /// `|value - expected| / max(|expected|, scale)`.
    pub rel_deviation: Option<f64>,
    /// Largest acceptable `rel_deviation`.
    pub tolerance: Option<f64>,
    pub converged: bool,
    pub wall_ms: Option<f64>,
}

impl RunRecord {
    /// Informational row with no expectation attached.
    pub fn info(scenario: ScenarioKind, quantity: &str, value: QuadResult) -> Self {
        Self {
            scenario,
            quantity: quantity.to_string(),
            inputs: Vec::new(),
            value: value.value,
            error_estimate: value.error_estimate,
            expected: None,
            rel_deviation: None,
            tolerance: None,
            converged: value.converged,
            wall_ms: None,
        }
    }

    /// Row checked against `expected`. `scale` sets the denominator when the
    /// expected value is zero or small.
    pub fn checked(
        scenario: ScenarioKind,
        quantity: &str,
        value: QuadResult,
        expected: f64,
        scale: f64,
        tolerance: f64,
    ) -> Self {
        let denom = expected.abs().max(scale.abs());
        let diff = (value.value - expected).abs();
        let rel_deviation = if denom > 0.0 { diff / denom } else { diff };
        Self {
            expected: Some(expected),
            rel_deviation: Some(rel_deviation),
            tolerance: Some(tolerance),
            ..Self::info(scenario, quantity, value)
        }
    }

    pub fn passed(&self) -> bool {
        let within = match (self.rel_deviation, self.tolerance) {
            (Some(d), Some(t)) => d <= t,
            _ => true,
        };
        self.converged && self.value.is_finite() && within
    }
}

/// Shortest round-trip text of `x`; scientific outside `[1e-4, 1e15)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

/// Write `records` with a header row. All records must share one input
/// column set, which is the case for the records of a single run.
pub fn write_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let input_names: Vec<&str> = records
        .first()
        .map(|r| r.inputs.iter().map(|(k, _)| k.as_str()).collect())
        .unwrap_or_default();
    let header = LEAD_COLUMNS
        .iter()
        .copied()
        .chain(input_names.iter().copied())
        .chain(TRAIL_COLUMNS.iter().copied());
    w.write_record(header)?;
    for r in records {
        debug_assert_eq!(r.inputs.len(), input_names.len());
        let mut row = vec![r.scenario.name().to_string(), r.quantity.clone()];
        row.extend(r.inputs.iter().map(|(_, v)| format_number(*v)));
        row.extend([
            format_number(r.value),
            format_number(r.error_estimate),
            cell(r.expected),
            cell(r.rel_deviation),
            cell(r.tolerance),
            r.converged.to_string(),
            r.passed().to_string(),
            cell(r.wall_ms),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, records: &[RunRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let file = std::fs::File::create(path)?;
    write_csv(std::io::BufWriter::new(file), records)
}
