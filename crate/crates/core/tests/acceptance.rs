//! One test per acceptance criterion. Each prints its verdict line and the
//! per-check details, then fails if the criterion does not hold.

use turbofan_core::validation::{self, CriterionReport};

fn assert_criterion(report: CriterionReport) {
    print!("{report}");
    assert!(report.passed(), "criterion {} failed:\n{report}", report.id);
}

#[test]
fn criterion_01_takeoff_validation() {
    assert_criterion(validation::criterion_1());
}

#[test]
fn criterion_02_on_design_validation() {
    assert_criterion(validation::criterion_2());
}

#[test]
fn criterion_03_hydrogen_baseline() {
    assert_criterion(validation::criterion_3());
}

#[test]
fn criterion_04_inlet_temperature_trends() {
    assert_criterion(validation::criterion_4());
}

#[test]
fn criterion_05_cooling_deltas() {
    assert_criterion(validation::criterion_5());
}

#[test]
fn criterion_06_exergy_audit() {
    assert_criterion(validation::criterion_6());
}

#[test]
fn criterion_07_ga_against_oracle() {
    assert_criterion(validation::criterion_7());
}

#[test]
fn criterion_08_optimized_cycles() {
    assert_criterion(validation::criterion_8());
}

#[test]
fn criterion_09_topsis_ranking() {
    assert_criterion(validation::criterion_9());
}

#[test]
fn criterion_10_unit_checks() {
    assert_criterion(validation::criterion_10());
}
