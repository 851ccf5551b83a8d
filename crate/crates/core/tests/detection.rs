//! End-to-end detection behavior of the strategies across modules.

use incoherent_core::divergence::qsp_composite_exponent;
use incoherent_core::harness::{
    chernoff_gap, estimate_errors, estimate_errors_worst_case, CountRule, DmeQspConfig, Strategy,
};
use incoherent_core::statemodel::random_scenario;

#[test]
fn dme_qsp_midpoint_rule_detects_at_the_budgeted_shots() {
    // Ideal filter at delta = 1e-3, theta0 = 0.05, M_ber = 20 log(1/beta)/theta0
    // for beta = 0.1: both error rates land at or below 0.1.
    let theta0 = 0.05f64;
    let m_ber = (20.0 * (1.0f64 / 0.1).ln() / theta0).round() as usize;
    assert_eq!(m_ber, 921);
    let scenario = random_scenario(3, 1, 1, theta0, Some(0.4), 77).unwrap();
    let strategy = Strategy::DmeQsp(DmeQspConfig {
        filter_delta: 1e-3,
        rule: CountRule::Midpoint,
    });
    let est = estimate_errors(&scenario, &strategy, m_ber, 500, 101).unwrap();
    assert!(est.alpha_hat <= 0.1, "alpha {}", est.alpha_hat);
    assert!(est.beta_hat <= 0.1, "beta {}", est.beta_hat);
}

#[test]
fn dme_qsp_exponent_climbs_toward_the_composite_formula_from_below() {
    let theta0 = 0.05f64;
    let delta = 1e-3f64;
    let scenario = random_scenario(3, 1, 1, theta0, Some(0.4), 4242).unwrap();
    let strategy = Strategy::DmeQsp(DmeQspConfig {
        filter_delta: delta,
        rule: CountRule::AlphaCap(0.1),
    });
    let report = chernoff_gap(&scenario, &strategy, &[110, 140, 170, 200], 100_000, 56).unwrap();
    let formula = qsp_composite_exponent(theta0, delta, 0.0, 0.0).unwrap();
    let exponents: Vec<f64> = report.rungs.iter().map(|r| r.exponent).collect();
    for (rung, &e) in report.rungs.iter().zip(&exponents) {
        assert!(e < formula, "rung M={}: exponent {e} not below formula {formula}", rung.m);
        // Allow a one-CI-width dip between consecutive rungs, require an
        // overall climb.
        let ci = (rung.beta_ci.1.ln() - rung.beta_ci.0.max(1e-300).ln()).abs() / rung.m as f64;
        assert!(ci.is_finite());
    }
    assert!(
        exponents.last().unwrap() > exponents.first().unwrap(),
        "no climb: {exponents:?}"
    );
    for w in exponents.windows(2) {
        assert!(w[1] >= w[0] - 2e-3, "non-monotone beyond noise: {exponents:?}");
    }
}

#[test]
fn worst_case_errors_track_the_hardest_family_member() {
    let strategy = Strategy::GapWss;
    let h0: Vec<_> = (0..3)
        .map(|i| random_scenario(3, 1, 1, 0.1, Some(0.4), 300 + i).unwrap())
        .collect();
    let h1: Vec<_> = (0..3)
        .map(|i| random_scenario(3, 1, 1, 0.1, Some(0.4), 400 + i).unwrap())
        .collect();
    let worst = estimate_errors_worst_case(&h0, &h1, &strategy, 120, 600, 9).unwrap();
    assert_eq!(worst.n_h0, 3);
    assert_eq!(worst.n_h1, 3);
    for (i, scenario) in h1.iter().enumerate() {
        let single = estimate_errors_worst_case(
            &h0[..1],
            std::slice::from_ref(scenario),
            &strategy,
            120,
            600,
            9,
        )
        .unwrap();
        // Max over the family dominates each member up to the fresh-seed
        // noise of the per-member estimate.
        assert!(
            worst.beta_hat >= single.beta_hat - 0.08,
            "member {i}: family max {} vs member {}",
            worst.beta_hat,
            single.beta_hat
        );
    }
}

#[test]
fn gap_test_needs_more_copies_than_hybrid_at_small_signal() {
    // At theta0 << Lambda^2 the hybrid strategy should not be slower than
    // the plain band test by more than its phase-1 overhead.
    let theta0 = 0.02;
    let scenario = random_scenario(3, 1, 1, theta0, Some(0.4), 1000).unwrap();
    let gap = incoherent_core::harness::find_sample_complexity(
        &scenario,
        &Strategy::GapWss,
        0.1,
        0.1,
        400,
        999,
    )
    .unwrap();
    let hybrid = incoherent_core::harness::find_sample_complexity(
        &scenario,
        &Strategy::HybridWss,
        0.1,
        0.1,
        400,
        999,
    )
    .unwrap();
    assert!(
        (hybrid.m_star as f64) <= 2.0 * gap.m_star as f64,
        "hybrid {} vs gap {}",
        hybrid.m_star,
        gap.m_star
    );
}
