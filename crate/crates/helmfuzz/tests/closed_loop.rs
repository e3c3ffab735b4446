//! Whole-run invariants of the closed loop: odd symmetry of the full
//! system, bit-exact determinism, and the equilibrium run.

use helmfuzz::guidance::CommandSchedule;
use helmfuzz::{presets, run_scenario};

#[test]
fn mirrored_course_change_is_the_exact_negation() {
    let plus = run_scenario(&presets::fig4()).unwrap();
    let mut mirrored = presets::fig4();
    mirrored.schedule = CommandSchedule::step_command(-45.0_f64.to_radians());
    let minus = run_scenario(&mirrored).unwrap();

    assert_eq!(plus.len(), minus.len());
    for (a, b) in plus.records().iter().zip(minus.records().iter()) {
        for (x, y) in [
            (a.psi_cmd, b.psi_cmd),
            (a.psi_d, b.psi_d),
            (a.psi, b.psi),
            (a.psi_err, b.psi_err),
            (a.r_d, b.r_d),
            (a.r, b.r),
            (a.r_err, b.r_err),
            (a.delta_cmd, b.delta_cmd),
            (a.delta_applied, b.delta_applied),
        ] {
            assert!((x + y).abs() <= 1e-9, "t = {}: {x} vs {y}", a.t);
        }
        assert_eq!(a.h, b.h);
    }
}

#[test]
fn identical_scenarios_produce_bit_identical_logs() {
    let first = run_scenario(&presets::fig6()).unwrap();
    let second = run_scenario(&presets::fig6()).unwrap();
    assert_eq!(first, second);
    for (a, b) in first.records().iter().zip(second.records().iter()) {
        assert_eq!(a.psi.to_bits(), b.psi.to_bits());
        assert_eq!(a.delta_applied.to_bits(), b.delta_applied.to_bits());
    }
}

#[test]
fn zero_command_full_run_never_moves() {
    let mut scenario = presets::fig5();
    scenario.schedule = CommandSchedule::step_command(0.0);
    let log = run_scenario(&scenario).unwrap();
    assert_eq!(log.len(), 12001);
    for rec in log.records() {
        assert!(rec.psi.abs() < 1e-9);
        assert!(rec.delta_applied.abs() < 1e-9);
    }
}
