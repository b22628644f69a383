use highway_toll::axioms::{
    axiom_matrix, check_axiom, expected_axioms, harness_table, independence_harness, verify_harness, Axiom, SuiteConfig,
};
use highway_toll::{AllocationRule, Counterexample, Method, TollError};

fn config() -> SuiteConfig {
    SuiteConfig { trials: 60, seed: 5, ..SuiteConfig::default() }
}

#[test]
fn named_methods_satisfy_their_axioms() {
    for m in Method::ALL {
        for axiom in expected_axioms(m) {
            let v = check_axiom(&m, *axiom, &config());
            assert!(v.holds, "{m} {axiom}: {:?}", v.witness.map(|w| w.instance.describe()));
            assert!(v.instances_checked > 0);
        }
    }
}

#[test]
fn every_failure_replays_exactly() {
    let rules: Vec<&dyn AllocationRule> = vec![&Method::Ses, &Method::Sps, &Method::Scs, &Counterexample::Hybrid];
    for row in axiom_matrix(&rules, &Axiom::ALL, &config()) {
        for v in row {
            if let Some(w) = &v.witness {
                let rule = rules.iter().find(|r| r.name() == v.rule).unwrap();
                assert_eq!(w.replay(*rule).gap, w.evaluation.gap, "{} {}", v.rule, v.axiom);
            } else {
                assert!(v.holds);
            }
        }
    }
}

#[test]
fn verdicts_are_deterministic() {
    let rules: Vec<&dyn AllocationRule> = vec![&Method::Sps];
    assert_eq!(axiom_matrix(&rules, &Axiom::ALL, &config()), axiom_matrix(&rules, &Axiom::ALL, &config()));
    let other = SuiteConfig { seed: 6, ..config() };
    let a = check_axiom(&Method::Sps, Axiom::Additivity, &config());
    let b = check_axiom(&Method::Sps, Axiom::Additivity, &other);
    assert!(!a.holds && !b.holds);
}

#[test]
fn harness_reproduces_independence() {
    let rows = independence_harness(&config()).unwrap();
    assert_eq!(rows.len(), 11);
    let failed: Vec<(String, Axiom)> = rows.iter().map(|r| (r.rule.clone(), r.designated)).collect();
    assert!(failed.contains(&("A2_hybrid".to_string(), Axiom::Linearity)));
    assert!(failed.contains(&("A1_tilde".to_string(), Axiom::InessentialSegment)));
    assert!(failed.contains(&("A2_entrance".to_string(), Axiom::WeakSegmentSymmetry)));
    assert!(failed.contains(&("ses".to_string(), Axiom::TollComponentFairness)));
}

#[test]
fn harness_reports_mismatches() {
    let mut rows = harness_table(&config());
    rows[0].designated = Axiom::Covariance;
    match verify_harness(rows) {
        Err(TollError::HarnessMismatch { method, axiom, .. }) => {
            assert_eq!(method, "A1_involvement_sum");
            assert!(axiom == "efficiency" || axiom == "covariance");
        }
        other => panic!("expected a mismatch, got {other:?}"),
    }
}
