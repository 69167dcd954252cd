//! Acceptance gate. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use abphase::ab_scenario::inertness_bound;
use abphase::ab_scenario::{
    ab_action_difference, action_along_path, action_along_polyline, build_lattice,
    lattice_action_field_picture, lattice_action_potential_picture, pair_identity_check,
    pair_identity_closed_form, ABGeometry, LatticeCounts, Side,
};
use abphase::classical_device::{cancellation, delta_i2, delta_w_numeric, delta_w_thin, ClassicalSolenoid};
use abphase::fields::{FluxString, MagneticDipole, MovingCharge};
use abphase::neutron_scenario::{emf_gauss_check, neutron_phase, EmfCheck, FieldProfile, NeutronRun};
use abphase::numerics::{Polyline, Tolerance, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn check(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn flux_string_geometry(flux: f64, charge: f64, impact: f64) -> ABGeometry {
    ABGeometry::new(FluxString::new(0.1, flux).unwrap(), impact, 0.01, charge).unwrap()
}

fn ac1_action_difference() -> Outcome {
    let start = Instant::now();
    let rep = ab_action_difference(&flux_string_geometry(TAU, -1.0, 1.0), Tolerance::default()).unwrap();
    let elapsed = start.elapsed();
    let dev = rel(rep.delta_i, -TAU);
    check(
        dev <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("dI = {:.15} vs -2pi, rel dev {dev:.2e}, {elapsed:?}", rep.delta_i),
    )
}

fn ac2_one_sided_action() -> Outcome {
    let g = flux_string_geometry(TAU, -1.0, 1.0);
    let right = action_along_path(&g, Side::Right, Tolerance::default()).unwrap();
    let expected = g.charge * g.magnet.flux / 2.0;
    let dev = rel(right.value, expected);
    check(
        dev <= 1e-8,
        format!(
            "dI1 = {:.15} vs e*Phi/2 = {expected:.15}, rel dev {dev:.2e}",
            right.value
        ),
    )
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn ac3_pair_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let dipole_pos = 10.0 * random_unit(&mut rng) * rng.gen_range(0.0..1.0);
        let sep = rng.gen_range(0.5..50.0);
        let electron = dipole_pos + sep * random_unit(&mut rng);
        let v = rng.gen_range(0.0..0.099) * random_unit(&mut rng);
        let c = MovingCharge::new(rng.gen_range(-2.0..2.0), v, electron).unwrap();
        let d = MagneticDipole::new(rng.gen_range(0.01..5.0) * random_unit(&mut rng), dipole_pos);
        worst = worst.max(pair_identity_check(&c, &d).unwrap().relative_deviation());
    }
    // electron at (R_s, 0, Z0) moving along y; dipole along z at the origin
    let (m, e, v) = (1.3, -1.0, 0.01);
    let electron = Vec3::new(0.9, 0.0, 2.1);
    let pair = pair_identity_check(
        &MovingCharge::new(e, v * Vec3::Y, electron).unwrap(),
        &MagneticDipole::new(m * Vec3::Z, Vec3::ZERO),
    )
    .unwrap();
    let closed = pair_identity_closed_form(m, e, v, electron);
    let geo = rel(pair.lhs, closed).max(rel(pair.rhs, closed));
    check(
        worst <= 1e-12 && geo <= 1e-12,
        format!("worst random rel dev {worst:.2e} over 1e4; reference geometry rel dev {geo:.2e}"),
    )
}

fn ac4_cancellation() -> Outcome {
    let tol = Tolerance::default();
    let radius = 0.05;
    let mut worst_total: f64 = 0.0;
    let mut worst_i2: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for flux in [0.1, 1.0, 10.0, 100.0] {
        let s = ClassicalSolenoid::with_flux(radius, flux).unwrap();
        let mut i2s = Vec::new();
        for a in [1.0, 2.0, 5.0, 10.0] {
            let g = ABGeometry::new(s.as_flux_string(), a, 0.01, -1.0).unwrap();
            let half = g.charge * flux / 2.0;
            let rep = cancellation(&s, &g, tol).unwrap();
            worst_total = worst_total.max(rep.total.abs() / half.abs());
            worst_i2 = worst_i2.max(rel(rep.delta_i2.value, -half));
            i2s.push(delta_i2(&s, &g, tol).unwrap().value);
        }
        let (lo, hi) = i2s
            .iter()
            .fold((f64::MAX, f64::MIN), |(l, h), &x| (l.min(x), h.max(x)));
        worst_spread = worst_spread.max((hi - lo) / hi.abs().max(lo.abs()));
    }
    check(
        worst_total <= 1e-8 && worst_i2 <= 1e-8 && worst_spread <= 1e-7,
        format!(
            "|dI1+dI2|/|ePhi/2| <= {worst_total:.2e}; dI2 vs -ePhi/2 <= {worst_i2:.2e}; a-spread {worst_spread:.2e}"
        ),
    )
}

fn ac5_delta_w() -> Outcome {
    let s = ClassicalSolenoid::with_flux(0.05, TAU).unwrap();
    let g = ABGeometry::new(s.as_flux_string(), 1.0, 0.01, -1.0).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let y = -10.0 + 20.0 * k as f64 / 9.0;
        let numeric = delta_w_numeric(&s, &g, y, Tolerance::default()).unwrap();
        worst = worst.max(rel(numeric.value, delta_w_thin(&s, &g, y)));
    }
    check(
        worst <= 1e-6,
        format!("max rel dev over 10 y samples {worst:.2e}"),
    )
}

fn ac6_emf_null() -> Outcome {
    let start = Instant::now();
    let tol = Tolerance::new(1e-10, 1e-16);
    let radius = 1.0;
    let mut values = Vec::new();
    let mut worst_gap: f64 = 0.0;
    for factor in [10.0, 20.0, 40.0, 80.0] {
        let chk = EmfCheck::new(
            radius,
            factor * radius,
            Vec3::new(0.5 * radius, 0.0, 0.5 * radius),
            Vec3::Z,
            Vec3::new(0.0, 0.0, 0.01),
        )
        .unwrap();
        let g = emf_gauss_check(&chk, tol).unwrap();
        worst_gap = worst_gap.max(g.relative_gap());
        values.push(g.surface_e.value);
    }
    let elapsed = start.elapsed();
    let monotone = values.windows(2).all(|w| w[1].abs() < w[0].abs());
    let ratio = values[3].abs() / values[0].abs();
    check(
        monotone && ratio < 1e-3 && worst_gap <= 1e-8 && elapsed < Duration::from_secs(30),
        format!(
            "EMF {:?}; last/first {ratio:.2e}; E-vs-Br gap {worst_gap:.2e}; {elapsed:?}",
            values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>()
        ),
    )
}

fn ac7_two_pictures() -> Outcome {
    let start = Instant::now();
    let g = ABGeometry::canonical();
    let lat = build_lattice(
        g.magnet.radius,
        100.0 * g.impact,
        g.magnet.flux,
        LatticeCounts::new(16, 4, 16),
    )
    .unwrap();
    let tol = Tolerance::default();
    let pot = lattice_action_potential_picture(&lat, &g, tol).unwrap();
    let fld = lattice_action_field_picture(&lat, &g, tol).unwrap();
    let elapsed = start.elapsed();
    let expected = g.expected_delta_i();
    // reference only: axial spacing below the impact parameter
    let fine = build_lattice(
        g.magnet.radius,
        100.0 * g.impact,
        g.magnet.flux,
        LatticeCounts::new(512, 4, 16),
    )
    .unwrap();
    let fine_dev = rel(
        lattice_action_potential_picture(&fine, &g, tol).unwrap().delta_i,
        expected,
    );
    let gap = rel(pot.delta_i, fld.delta_i);
    let dev_pot = rel(pot.delta_i, expected);
    let dev_fld = rel(fld.delta_i, expected);
    check(
        gap <= 1e-10 && dev_pot <= 1e-2 && dev_fld <= 1e-2 && elapsed < Duration::from_secs(120),
        format!(
            "16x4x16, L/a=100: pictures differ by {gap:.2e} (<= 1e-10); \
             dI = {:.6} vs ePhi = {expected:.6}, rel dev {dev_pot:.3e} / {dev_fld:.3e} (<= 1e-2); {elapsed:?}; [512x4x16 reference: rel dev {fine_dev:.3e}]",
            pot.delta_i
        ),
    )
}

fn ac8_neutron_phase() -> Outcome {
    let (m, b0, tau) = (0.9, 2.0, 0.25);
    let gauss = NeutronRun::new(
        m,
        0.01,
        FieldProfile::Gaussian {
            amplitude: b0,
            tau,
            center: 0.0,
        },
        (-8.0 * tau, 8.0 * tau),
    )
    .unwrap();
    let g = neutron_phase(&gauss, Tolerance::new(1e-12, 1e-15)).unwrap();
    let dev = rel(g.value, m * b0 * tau * PI.sqrt());
    let sine = NeutronRun::new(
        m,
        0.01,
        FieldProfile::Sinusoid {
            amplitude: b0,
            period: 3.0,
            phase: 0.0,
        },
        (0.0, 3.0),
    )
    .unwrap();
    let s = neutron_phase(&sine, Tolerance::default()).unwrap();
    check(
        dev <= 1e-9 && s.value.abs() < 1e-12,
        format!(
            "gaussian rel dev {dev:.2e}; full-period sinusoid phase {:.2e}",
            s.value
        ),
    )
}

fn ac9_inertness() -> Outcome {
    let b = inertness_bound(1e-8, 1e-4, 1e12).unwrap();
    // "exactly" up to the last bit of binary rounding
    let ulp = 2.0 * f64::EPSILON;
    check(
        rel(b.field_ratio, 1e-8) <= ulp && rel(b.transition_probability, 1e-16) <= ulp,
        format!(
            "field ratio {:e}, probability {:e}, aggregate over 1e12 atoms {:e}",
            b.field_ratio, b.transition_probability, b.aggregate
        ),
    )
}

fn ac10_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0100);
    let h = 1e-4;
    let mut worst_div: f64 = 0.0;
    let mut worst_curl: f64 = 0.0;
    let axes = [Vec3::X, Vec3::Y, Vec3::Z];
    let comp = |v: Vec3, i: usize| [v.x, v.y, v.z][i];
    for _ in 0..2000 {
        let d = MagneticDipole::new(rng.gen_range(0.1..3.0) * random_unit(&mut rng), Vec3::ZERO);
        let r = rng.gen_range(0.5..10.0) * random_unit(&mut rng);
        let b = d.b_field(r).unwrap();
        let div: f64 = (0..3)
            .map(|i| {
                let e = axes[i] * h;
                (comp(d.b_field(r + e).unwrap(), i) - comp(d.b_field(r - e).unwrap(), i)) / (2.0 * h)
            })
            .sum();
        worst_div = worst_div.max(div.abs() * h / b.norm());
        let da: Vec<Vec3> = (0..3)
            .map(|i| {
                let e = axes[i] * h;
                (d.vector_potential(r + e).unwrap() - d.vector_potential(r - e).unwrap()) / (2.0 * h)
            })
            .collect();
        let curl = Vec3::new(da[1].z - da[2].y, da[2].x - da[0].z, da[0].y - da[1].x);
        worst_curl = worst_curl.max((curl - b).norm() / b.norm());
    }

    let tol = Tolerance::default();
    let magnet = FluxString::new(0.5, TAU).unwrap();
    let a = 1.0;
    let ray = |x: f64| Polyline {
        incoming: Some(Vec3::Y),
        vertices: vec![Vec3::new(x, 0.0, 0.0)],
        outgoing: Some(Vec3::Y),
    };
    let right = action_along_polyline(&magnet, 1.0, &ray(a), tol).unwrap().value;
    let left = action_along_polyline(&magnet, 1.0, &ray(-a), tol).unwrap().value;
    let far_right = action_along_polyline(&magnet, 1.0, &ray(3.0 * a), tol)
        .unwrap()
        .value;
    let enclosing = (right - left - TAU).abs();
    let non_enclosing = (right - far_right).abs();

    let detour = Polyline {
        incoming: Some(Vec3::Y),
        vertices: vec![
            Vec3::new(a, -5.0, 0.0),
            Vec3::new(3.0 * a, -1.0, 0.5),
            Vec3::new(2.0 * a, 2.0, -2.0),
            Vec3::new(a, 0.5, 4.0),
            Vec3::new(a, 6.0, 0.0),
        ],
        outgoing: Some(Vec3::Y),
    };
    let deformed = action_along_polyline(&magnet, 1.0, &detour, tol).unwrap().value;
    let deformation = rel(deformed, right);

    check(
        worst_div <= 1e-6 && worst_curl <= 1e-6 && enclosing <= 1e-9 && non_enclosing <= 1e-9 && deformation <= 1e-8,
        format!(
            "div B*h/|B| {worst_div:.1e}; |curl A - B|/|B| {worst_curl:.1e}; winding errs {enclosing:.1e}/{non_enclosing:.1e}; deformation {deformation:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC-1  AB action difference = e*Phi", ac1_action_difference),
        ("AC-2  one-sided action = e*Phi/2", ac2_one_sided_action),
        ("AC-3  pair identity B_e.m = e v.A_m", ac3_pair_identity),
        ("AC-4  classical-device cancellation", ac4_cancellation),
        ("AC-5  dW closed form vs z-quadrature", ac5_delta_w),
        ("AC-6  EMF null under truncation sweep", ac6_emf_null),
        ("AC-7  two-picture lattice equivalence", ac7_two_pictures),
        ("AC-8  neutron phase", ac8_neutron_phase),
        ("AC-9  inertness bound", ac9_inertness),
        ("AC-10 property suites", ac10_properties),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let outcome = run();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        if !outcome.passed {
            failures += 1;
        }
        println!("[{tag}] {name}: {}", outcome.detail);
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
