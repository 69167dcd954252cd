use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, Output};

fn abphase(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abphase"))
        .args(args)
        .current_dir(dir)
        .env_remove("ABPHASE_OUT_DIR")
        .output()
        .expect("binary runs")
}

/// Rows of a CSV as header-keyed maps.
fn rows(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().clone();
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            headers
                .iter()
                .map(String::from)
                .zip(r.iter().map(String::from))
                .collect()
        })
        .collect()
}

fn value(row: &std::collections::HashMap<String, String>, key: &str) -> f64 {
    row[key].parse().unwrap()
}

#[test]
fn flux_string_defaults_give_e_phi() {
    let dir = tempfile::tempdir().unwrap();
    let out = abphase(dir.path(), &["run", "--scenario", "ab-flux-string"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = rows(&dir.path().join("ab-flux-string.csv"));
    let d = rows.iter().find(|r| r["quantity"] == "delta_I").unwrap();
    assert!((value(d, "value") + TAU).abs() < 1e-9);
    assert_eq!(d["passed"], "true");
    assert_eq!(d["wall_ms"], "");
}

#[test]
fn classical_flux_sweep_cancels() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.toml"),
        "scenario = \"classical-device\"\noutput = \"out/classical.csv\"\n\n[sweep]\nparam = \"flux\"\nvalues = [1, 10, 100]\n",
    )
    .unwrap();
    let out = abphase(dir.path(), &["run", "sweep.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&dir.path().join("out/classical.csv"));
    let totals: Vec<_> = rows.iter().filter(|r| r["quantity"] == "total").collect();
    assert_eq!(totals.len(), 3);
    for (row, flux) in totals.iter().zip([1.0, 10.0, 100.0]) {
        assert_eq!(value(row, "flux"), flux);
        assert!(value(row, "value").abs() <= 1e-8 * flux / 2.0);
    }
}

#[test]
fn inertness_reference_record() {
    let dir = tempfile::tempdir().unwrap();
    let out = abphase(dir.path(), &["run", "--scenario", "inertness", "-o", "i.csv"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&dir.path().join("i.csv"));
    let get = |q: &str| value(rows.iter().find(|r| r["quantity"] == q).unwrap(), "value");
    assert!((get("field_ratio") / 1e-8 - 1.0).abs() < 1e-15);
    assert!((get("transition_probability") / 1e-16 - 1.0).abs() < 1e-15);
    assert!((get("aggregate") / 1e-4 - 1.0).abs() < 1e-15);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "scenario = \"neutron-emf\"\n[sweep]\nparam = \"length_ratio\"\nvalues = [10, 20, 40, 80]\n";
    std::fs::write(dir.path().join("emf.toml"), cfg).unwrap();
    abphase(dir.path(), &["run", "emf.toml", "-o", "a.csv"]);
    abphase(dir.path(), &["run", "emf.toml", "-o", "b.csv", "--workers", "3"]);
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn emf_tail_shrinks_with_length() {
    let dir = tempfile::tempdir().unwrap();
    let out = abphase(
        dir.path(),
        &[
            "run",
            "--scenario",
            "neutron-emf",
            "--set",
            "sweep.param=length_ratio",
            "--set",
            "sweep.values=10,20,40,80",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let rel: Vec<f64> = rows(&dir.path().join("neutron-emf.csv"))
        .iter()
        .filter(|r| r["quantity"] == "emf_relative")
        .map(|r| value(r, "value").abs())
        .collect();
    assert_eq!(rel.len(), 4);
    assert!(rel.windows(2).all(|w| w[1] < w[0]));
    assert!(rel[3] < 1e-3 * rel[0]);
}

#[test]
fn table_profile_without_values_lists_missing_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        "scenario = \"neutron-phase\"\n[profile]\nkind = \"table\"\ntimes = [0, 1]\n",
    )
    .unwrap();
    let out = abphase(dir.path(), &["run", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("missing required keys: profile.values"), "{err}");
    assert!(!dir.path().join("neutron-phase.csv").exists());
}

#[test]
fn table_profile_matches_trapezoid() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("table.toml"),
        "scenario = \"neutron-phase\"\nparams.moment = 2\nparams.t_start = 0\nparams.t_end = 3\n\
         [profile]\nkind = \"table\"\ntimes = [0, 1, 2, 3]\nvalues = [0, 1, 1, 0]\n",
    )
    .unwrap();
    let out = abphase(dir.path(), &["run", "table.toml"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = rows(&dir.path().join("neutron-phase.csv"));
    assert!((value(&rows[0], "value") - 4.0).abs() < 1e-12);
}

#[test]
fn unknown_key_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = abphase(
        dir.path(),
        &["run", "--scenario", "ab-flux-string", "--set", "n_z=4"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.n_z"));
}

#[test]
fn report_flags_failures() {
    let dir = tempfile::tempdir().unwrap();
    // sixteen axial cells are far too coarse for the 1% lattice check
    let coarse = abphase(
        dir.path(),
        &[
            "run",
            "--scenario",
            "ab-lattice",
            "--set",
            "n_z=16",
            "--set",
            "n_phi=4",
            "-o",
            "coarse.csv",
        ],
    );
    assert_eq!(coarse.status.code(), Some(1));
    let fine = abphase(
        dir.path(),
        &["run", "--scenario", "classical-device", "-o", "fine.csv"],
    );
    assert_eq!(fine.status.code(), Some(0));

    let ok = abphase(dir.path(), &["report", "fine.csv"]);
    assert_eq!(ok.status.code(), Some(0));
    let both = abphase(dir.path(), &["report", "fine.csv", "coarse.csv"]);
    assert_eq!(both.status.code(), Some(1));
    let text = String::from_utf8_lossy(&both.stdout);
    assert!(text.contains("delta_I_potential"));
    assert!(text.contains("8 rows, 2 failed"), "{text}");
}

#[test]
fn out_dir_env_sets_default_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_abphase"))
        .args(["run", "--scenario", "identity-check", "--set", "samples=100"])
        .current_dir(dir.path())
        .env("ABPHASE_OUT_DIR", dir.path().join("results"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("results/identity-check.csv").exists());
}

#[test]
fn timing_fills_wall_clock_column() {
    let dir = tempfile::tempdir().unwrap();
    abphase(dir.path(), &["run", "--scenario", "inertness", "--timing"]);
    let rows = rows(&dir.path().join("inertness.csv"));
    assert!(rows.iter().all(|r| value(r, "wall_ms") >= 0.0));
}
