use std::io::Write;

use edr_core::suite::{self, CriterionOutcome, SuiteConfig};

// written to the raw handle so the line survives libtest's output capture
fn check(o: CriterionOutcome) {
    let _ = writeln!(std::io::stderr(), "{o}");
    assert!(o.passed, "{o}");
}

#[test]
fn criterion_1_spin_closed_forms() {
    check(suite::spin_closed_forms(&SuiteConfig::default()).unwrap());
}

#[test]
fn criterion_2_circle_tightness() {
    check(suite::circle_tightness().unwrap());
}

#[test]
fn criterion_3_mixed_state_separation() {
    check(suite::mixed_state_separation().unwrap());
}

#[test]
fn criterion_4_extremal_points() {
    check(suite::extremal_points().unwrap());
}

#[test]
fn criterion_5_universality() {
    check(suite::universality(&SuiteConfig::default()).unwrap());
}

#[test]
fn criterion_6_heisenberg_violability() {
    check(suite::heisenberg_violability().unwrap());
}

#[test]
fn criterion_7_supplemental_bridge() {
    check(suite::supplemental_bridge(&SuiteConfig::default()).unwrap());
}

#[test]
fn criterion_8_pure_state_collapse() {
    check(suite::pure_state_collapse(&SuiteConfig::default()).unwrap());
}

#[test]
fn criterion_9_comparator_dominance() {
    check(suite::comparator_dominance().unwrap());
}

#[test]
fn summary() {
    let outcomes = suite::run_all(&SuiteConfig::default()).unwrap();
    let passed = outcomes.iter().filter(|o| o.passed).count();
    for o in &outcomes {
        println!("{o}");
    }
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    assert_eq!(passed, outcomes.len());
}
