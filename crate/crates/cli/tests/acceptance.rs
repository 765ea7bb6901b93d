//! Acceptance suite: one test per gate criterion, each printing its
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).
//! The criteria live in `thermoprobe_core::selftest` so the `selftest`
//! subcommand runs exactly the same checks; the export-determinism criterion
//! is additionally exercised end to end through the compiled binary.

use std::process::Command;

use thermoprobe_core::selftest::{self, CriterionOutcome};

fn assert_criterion(outcome: CriterionOutcome) {
    println!("{}", outcome.line());
    assert!(outcome.passed(), "{}", outcome.line());
}

#[test]
fn thermal_route_equivalence() {
    assert_criterion(selftest::thermal_route_equivalence());
}

#[test]
fn teleport_closed_form_equivalence() {
    assert_criterion(selftest::teleport_closed_form_equivalence());
}

#[test]
fn qfi_triple_route_agreement() {
    assert_criterion(selftest::qfi_triple_route_agreement());
}

#[test]
fn sld_measurement_optimality() {
    assert_criterion(selftest::sld_measurement_optimality());
}

#[test]
fn derivative_cross_check() {
    assert_criterion(selftest::derivative_cross_check());
}

#[test]
fn direct_beats_remote() {
    assert_criterion(selftest::direct_beats_remote());
}

#[test]
fn low_temperature_fidelity() {
    assert_criterion(selftest::low_temperature_fidelity());
}

#[test]
fn qfi_hss_extremum_alignment() {
    assert_criterion(selftest::qfi_hss_extremum_alignment());
}

#[test]
fn coupling_improves_remote_sensitivity() {
    assert_criterion(selftest::coupling_improves_remote_sensitivity());
}

#[test]
fn high_temperature_saturation() {
    assert_criterion(selftest::high_temperature_saturation());
}

#[test]
fn export_determinism() {
    assert_criterion(selftest::export_determinism());

    // end to end: the compiled binary twice over, byte-compared
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = Command::new(env!("CARGO_BIN_EXE_thermoprobe"))
            .args(["figure", "fig4", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "binary reruns must produce byte-identical CSV");
    println!("PASS export-determinism (binary) — {} bytes, identical", a.len());
}
