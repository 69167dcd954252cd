//! Configuration-driven runs of the scenarios in `abphase`, written as CSV.
//!
//! A run is a scenario name, parameter overrides and an optional sweep of
//! one parameter. Each sweep point yields a few records (one CSV row per
//! quantity) that carry the computed value, its error estimate, and, where a
//! closed form exists, the expected value and whether it was met.

pub mod config;
pub mod convergence;
pub mod error;
pub mod record;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

pub use config::{ScenarioConfig, ScenarioKind};
pub use error::{Result, RunnerError};
pub use record::RunRecord;
pub use scenarios::Point;

/// Parameter points of a run: one per sweep value, or the base point.
pub fn expand_points(cfg: &ScenarioConfig) -> Vec<Point> {
    match &cfg.sweep {
        None => vec![cfg.parameters.clone()],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|&v| {
                let mut p = cfg.parameters.clone();
                p.insert(sweep.param.clone(), v);
                p
            })
            .collect(),
    }
}

fn timed_point(cfg: &ScenarioConfig, point: &Point) -> Result<Vec<RunRecord>> {
    let start = Instant::now();
    let mut records = scenarios::run_point(cfg, point)?;
    if cfg.timing {
        let ms = start.elapsed().as_secs_f64() * 1e3;
        for r in &mut records {
            r.wall_ms = Some(ms);
        }
    }
    Ok(records)
}

/// Compute all records of a run, in sweep order.
pub fn execute(cfg: &ScenarioConfig) -> Result<Vec<RunRecord>> {
    let points = expand_points(cfg);
    let per_point: Vec<Vec<RunRecord>> = if cfg.workers > 1 && points.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| error::config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            points
                .par_iter()
                .map(|p| timed_point(cfg, p))
                .collect::<Result<_>>()
        })?
    } else {
        points
            .iter()
            .map(|p| timed_point(cfg, p))
            .collect::<Result<_>>()?
    };
    Ok(per_point.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub output_path: PathBuf,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(RunRecord::passed)
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.passed()).count()
    }
}

/// Compute a run and write its CSV to `cfg.output_path`.
pub fn run(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let records = execute(cfg)?;
    record::write_csv_file(&cfg.output_path, &records)?;
    Ok(RunOutcome {
        records,
        output_path: cfg.output_path.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use config::Sweep;

    #[test]
    fn sweep_expands_in_order() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::Inertness);
        cfg.sweep = Some(Sweep {
            param: "n_atoms".into(),
            values: vec![1.0, 2.0, 3.0],
        });
        let pts = expand_points(&cfg);
        assert_eq!(
            pts.iter().map(|p| p["n_atoms"]).collect::<Vec<_>>(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(pts[0]["atomic_distance"], 1e-8);
    }

    #[test]
    fn parallel_matches_serial() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::ClassicalDevice);
        cfg.sweep = Some(Sweep {
            param: "flux".into(),
            values: vec![1.0, 10.0, 100.0, 0.5],
        });
        let serial = execute(&cfg).unwrap();
        cfg.workers = 3;
        assert_eq!(serial, execute(&cfg).unwrap());
    }

    #[test]
    fn timing_fills_wall_ms() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::Inertness);
        assert!(execute(&cfg).unwrap().iter().all(|r| r.wall_ms.is_none()));
        cfg.timing = true;
        assert!(execute(&cfg).unwrap().iter().all(|r| r.wall_ms.is_some()));
    }
}
