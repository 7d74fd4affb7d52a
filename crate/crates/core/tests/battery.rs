//! The verification battery on the remaining reference systems: a random
//! cubic curve (exact-oracle path) and a random 2-plane in the four-torus
//! (multistart path with parity checks downgraded to warnings).

mod common;

use amoeba::polytope::Degrees;
use amoeba::verify::{verify_system, CheckStatus, VerifyConfig};
use common::{random_curve, random_linear_n2};

#[test]
fn battery_on_a_random_cubic() {
    let sys = random_curve(3, 202);
    let cfg = VerifyConfig {
        fiber_samples: 60,
        volume_samples: 1500,
        omega_samples: 60,
        min_queries: 40,
        seed: 5,
        ..VerifyConfig::default()
    };
    let report = verify_system(&sys, &cfg).unwrap();
    assert_eq!(report.degrees, Some(Degrees { alpha: 9, beta: 18 }));
    for c in &report.checks {
        assert_ne!(
            c.status,
            CheckStatus::Fail,
            "check {} failed: lhs={:?} rhs={:?} ({})",
            c.name,
            c.lhs,
            c.rhs,
            c.notes
        );
    }
    // the extremal-volume flag is informational; it must be reported
    let mh = report
        .checks
        .iter()
        .find(|c| c.name == "multiharnack")
        .unwrap();
    assert!(mh.notes.contains("multiHarnack="));
}

#[test]
fn battery_on_a_random_2_plane() {
    let sys = random_linear_n2(303);
    let cfg = VerifyConfig {
        fiber_samples: 60,
        volume_samples: 1200,
        omega_samples: 40,
        min_queries: 40,
        box_halfwidth: 8.0,
        seed: 6,
        ..VerifyConfig::default()
    };
    let report = verify_system(&sys, &cfg).unwrap();
    assert_eq!(report.degrees, Some(Degrees { alpha: 1, beta: 6 }));
    for c in &report.checks {
        assert_ne!(
            c.status,
            CheckStatus::Fail,
            "check {} failed: lhs={:?} rhs={:?} ({})",
            c.name,
            c.lhs,
            c.rhs,
            c.notes
        );
    }
    // the exact oracle only exists for curves
    let agreement = report
        .checks
        .iter()
        .find(|c| c.name == "oracle-solver-agreement")
        .unwrap();
    assert_eq!(agreement.status, CheckStatus::Skipped);
}
