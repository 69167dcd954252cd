//! Lattice convergence study: refine the cell grid at fixed length, then
//! lengthen the magnet at fixed axial spacing.

use std::io::Write;
use std::path::Path;

use abphase::ab_scenario::{
    build_lattice, lattice_action_field_picture, lattice_action_potential_picture, ABGeometry, LatticeCounts,
};
use abphase::fields::FluxString;
use abphase::Tolerance;
use rayon::prelude::*;

use crate::error::{Result, RunnerError};
use crate::record::format_number;

/// Refinement ladder at `L/a = 100`.
pub const DEFAULT_LADDER: [(usize, usize, usize); 4] = [(16, 2, 8), (64, 4, 16), (256, 4, 16), (512, 4, 16)];
/// Half-lengths, in units of the impact parameter, of the length ladder.
pub const DEFAULT_LENGTHS: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Refinement,
    Length,
}

impl Ladder {
    pub fn name(self) -> &'static str {
        match self {
            Ladder::Refinement => "refinement",
            Ladder::Length => "length",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rung {
    pub ladder: Ladder,
    pub counts: LatticeCounts,
    pub length_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub rung: Rung,
    pub delta_i_potential: f64,
    pub delta_i_field: f64,
    pub expected: f64,
    /// `|ΔI_potential - eΦ| / |eΦ|`
    pub rel_deviation: f64,
    /// `|ΔI_potential - ΔI_field| / |eΦ|`
    pub picture_gap: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Deviation never grows from one rung to the next within each ladder.
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn final_refinement(&self) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .rev()
            .find(|r| r.rung.ladder == Ladder::Refinement)
    }
}

/// The default refinement ladder followed by the length ladder, whose axial
/// cell count scales with length so the spacing of the finest rung is kept.
pub fn default_rungs() -> Vec<Rung> {
    let mut rungs: Vec<Rung> = DEFAULT_LADDER
        .iter()
        .map(|&(n_z, n_r, n_phi)| Rung {
            ladder: Ladder::Refinement,
            counts: LatticeCounts::new(n_z, n_r, n_phi),
            length_ratio: 100.0,
        })
        .collect();
    let (n_z, n_r, n_phi) = DEFAULT_LADDER[DEFAULT_LADDER.len() - 1];
    rungs.extend(DEFAULT_LENGTHS.iter().map(|&ratio| Rung {
        ladder: Ladder::Length,
        counts: LatticeCounts::new(((n_z as f64) * ratio / 100.0).round() as usize, n_r, n_phi),
        length_ratio: ratio,
    }));
    rungs
}

fn evaluate(g: &ABGeometry, rung: Rung, tol: Tolerance) -> abphase::Result<ConvergenceRow> {
    let lat = build_lattice(
        g.magnet.radius,
        rung.length_ratio * g.impact,
        g.magnet.flux,
        rung.counts,
    )?;
    let pot = lattice_action_potential_picture(&lat, g, tol)?;
    let fld = lattice_action_field_picture(&lat, g, tol)?;
    let expected = g.expected_delta_i();
    Ok(ConvergenceRow {
        rung,
        delta_i_potential: pot.delta_i,
        delta_i_field: fld.delta_i,
        expected,
        rel_deviation: (pot.delta_i - expected).abs() / expected.abs(),
        picture_gap: (pot.delta_i - fld.delta_i).abs() / expected.abs(),
        converged: pot.converged() && fld.converged(),
    })
}

/// Evaluate every rung for the electron geometry `g`; with `workers > 1`
/// rungs run concurrently, rows stay in rung order.
pub fn convergence_report(
    g: &ABGeometry,
    rungs: &[Rung],
    tol: Tolerance,
    workers: usize,
) -> Result<ConvergenceReport> {
    let wrap = |source| RunnerError::Physics {
        scenario: "ab-lattice".into(),
        source,
    };
    let rows: Vec<ConvergenceRow> = if workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| crate::error::config(format!("cannot start worker pool: {e}")))?;
        pool.install(|| {
            rungs
                .par_iter()
                .map(|r| evaluate(g, *r, tol))
                .collect::<abphase::Result<_>>()
        })
        .map_err(wrap)?
    } else {
        rungs
            .iter()
            .map(|r| evaluate(g, *r, tol))
            .collect::<abphase::Result<_>>()
            .map_err(wrap)?
    };
    let monotone = rows
        .windows(2)
        .all(|w| w[0].rung.ladder != w[1].rung.ladder || w[1].rel_deviation <= w[0].rel_deviation + 1e-12);
    Ok(ConvergenceReport { rows, monotone })
}

pub fn default_geometry(flux: f64) -> abphase::Result<ABGeometry> {
    ABGeometry::new(FluxString::new(0.1, flux)?, 1.0, 0.01, -1.0)
}

pub fn write_report<W: Write>(out: W, report: &ConvergenceReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "ladder",
        "n_z",
        "n_r",
        "n_phi",
        "length_ratio",
        "cells",
        "delta_I_potential",
        "delta_I_field",
        "expected",
        "rel_deviation",
        "picture_gap",
        "converged",
    ])?;
    for row in &report.rows {
        let c = row.rung.counts;
        w.write_record([
            row.rung.ladder.name().to_string(),
            c.n_z.to_string(),
            c.n_r.to_string(),
            c.n_phi.to_string(),
            format_number(row.rung.length_ratio),
            c.total().to_string(),
            format_number(row.delta_i_potential),
            format_number(row.delta_i_field),
            format_number(row.expected),
            format_number(row.rel_deviation),
            format_number(row.picture_gap),
            row.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_report_file(path: &Path, report: &ConvergenceReport) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_report(std::io::BufWriter::new(std::fs::File::create(path)?), report)
}
