use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use abphase_runner::config::{self, FlatConfig, RawValue};
use abphase_runner::convergence::{self, convergence_report, default_rungs};
use abphase_runner::{report, run, Result, ScenarioConfig, ScenarioKind};

/// Aharonov-Bohm, classical-device and neutron-phase computations.
///
/// Exit status: 0 when every expectation is met, 1 when a result misses its
/// tolerance, 2 on configuration errors.
#[derive(Parser)]
#[command(name = "abphase", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write one CSV row per computed quantity.
    Run(RunArgs),
    /// Summarize result CSVs: rows, failures and worst deviation per quantity.
    Report {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
    },
    /// Lattice convergence ladder (cell refinement, then magnet length).
    Converge(RunArgs),
    /// List scenarios and their parameters with defaults.
    Scenarios,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file.
    config: Option<PathBuf>,
    /// Scenario name; overrides the config file.
    #[arg(long)]
    scenario: Option<String>,
    /// `key=value` override; bare keys address `params.<key>`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV path (default: $ABPHASE_OUT_DIR/<scenario>.csv).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Record wall-clock time per sweep point.
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn flat(&self, forced: Option<ScenarioKind>) -> Result<FlatConfig> {
        let mut flat = match &self.config {
            Some(path) => config::load_file(path)?,
            None => FlatConfig::new(),
        };
        if let Some(name) = &self.scenario {
            flat.insert("scenario".into(), RawValue::Text(name.clone()));
        }
        if let Some(kind) = forced {
            flat.insert("scenario".into(), RawValue::Text(kind.name().into()));
        }
        config::apply_overrides(&mut flat, &self.set)?;
        if let Some(out) = &self.output {
            flat.insert("output".into(), RawValue::Text(out.display().to_string()));
        }
        if let Some(w) = self.workers {
            flat.insert("workers".into(), RawValue::Number(w as f64));
        }
        if self.timing {
            flat.insert("timing".into(), RawValue::Bool(true));
        }
        Ok(flat)
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let cfg = ScenarioConfig::from_flat(&args.flat(None)?)?;
    let outcome = run(&cfg)?;
    for r in outcome.records.iter().filter(|r| !r.passed()) {
        eprintln!(
            "FAIL {} {}: value {} expected {:?} rel dev {:?} tolerance {:?} converged {}",
            r.scenario, r.quantity, r.value, r.expected, r.rel_deviation, r.tolerance, r.converged
        );
    }
    println!(
        "{}: {} records, {} failed -> {}",
        cfg.scenario,
        outcome.records.len(),
        outcome.failures(),
        outcome.output_path.display()
    );
    Ok(status(outcome.all_passed()))
}

fn cmd_converge(args: &RunArgs) -> Result<ExitCode> {
    let mut flat = args.flat(Some(ScenarioKind::AbLattice))?;
    if !flat.contains_key("output") {
        let path = config::default_output_dir().join("convergence.csv");
        flat.insert("output".into(), RawValue::Text(path.display().to_string()));
    }
    let cfg = ScenarioConfig::from_flat(&flat)?;
    let magnet = abphase::fields::FluxString::new(cfg.param("radius"), cfg.param("flux"));
    let g = magnet
        .and_then(|m| {
            abphase::ab_scenario::ABGeometry::new(
                m,
                cfg.param("impact"),
                cfg.param("speed"),
                cfg.param("charge"),
            )
        })
        .map_err(|source| abphase_runner::RunnerError::Physics {
            scenario: cfg.scenario.name().into(),
            source,
        })?;
    let rep = convergence_report(&g, &default_rungs(), cfg.tolerances, cfg.workers)?;
    convergence::write_report_file(&cfg.output_path, &rep)?;
    for row in &rep.rows {
        let c = row.rung.counts;
        println!(
            "{:<10} {:>5}x{}x{:<3} L/a={:<5} dI={:+.9} rel dev {:.3e} picture gap {:.1e}",
            row.rung.ladder.name(),
            c.n_z,
            c.n_r,
            c.n_phi,
            row.rung.length_ratio,
            row.delta_i_potential,
            row.rel_deviation,
            row.picture_gap
        );
    }
    let tolerance = cfg.param("model_tolerance");
    let final_ok = rep
        .final_refinement()
        .is_some_and(|r| r.rel_deviation <= tolerance);
    let converged = rep.rows.iter().all(|r| r.converged);
    println!(
        "monotone {}, final refinement within {tolerance}: {final_ok} -> {}",
        rep.monotone,
        cfg.output_path.display()
    );
    Ok(status(rep.monotone && final_ok && converged))
}

fn cmd_report(paths: &[PathBuf]) -> Result<ExitCode> {
    let summary = report::summarize(paths)?;
    println!("{summary}");
    Ok(status(summary.all_passed()))
}

fn cmd_scenarios() -> ExitCode {
    for kind in ScenarioKind::ALL {
        let params: Vec<String> = kind.schema().iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{:<18} {}", kind.name(), params.join(" "));
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Report { csv } => cmd_report(csv),
        Command::Converge(args) => cmd_converge(args),
        Command::Scenarios => Ok(cmd_scenarios()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
