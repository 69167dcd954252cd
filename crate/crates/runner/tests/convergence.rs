use abphase::ab_scenario::ABGeometry;
use abphase::Tolerance;
use abphase_runner::convergence::{convergence_report, default_rungs, Ladder};

#[test]
fn default_ladder_reaches_one_percent() {
    let rungs: Vec<_> = default_rungs()
        .into_iter()
        .filter(|r| r.ladder == Ladder::Refinement)
        .collect();
    let rep = convergence_report(&ABGeometry::canonical(), &rungs, Tolerance::default(), 1).unwrap();
    assert!(rep.monotone);
    let last = rep.final_refinement().unwrap();
    assert!(last.rel_deviation < 0.01, "{last:?}");
    // what remains is mostly the finite magnet length: 1 - (2/pi) atan(100)
    let truncation = 1.0 - std::f64::consts::FRAC_2_PI * 100f64.atan();
    assert!((last.rel_deviation - truncation).abs() < 0.1 * truncation);
    assert!(rep.rows.iter().all(|r| r.picture_gap < 1e-10 && r.converged));
}
