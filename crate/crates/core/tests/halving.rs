mod common;

use common::*;
use resune::equilibrium::ScanConfig;
use resune::scenarios::{apply_halving, apply_subsidy_cut, halving_report, subsidy_shock_report, HalvingPrediction};

// Post-halving baseline root at 50-digit precision.
const BASELINE_POST: (f64, f64) = (1.011_497_602_181_231_9, 0.389_518_472_382_485_1);

#[test]
fn halving_lowers_price_and_hash_with_feedback() {
    for params in feedback_params() {
        let r = halving_report(&economy(params), &ScanConfig::default()).unwrap();
        assert!(r.uniqueness_pre && r.uniqueness_post);
        assert!(r.delta_p < 0.0 && r.delta_h < 0.0, "{r:?}");
        assert_eq!(r.prediction, HalvingPrediction::Confirmed);
        assert_eq!(r.selection_note, "pre: unique of 1; post: unique of 1");
    }
}

#[test]
fn baseline_post_halving_root() {
    let r = halving_report(&economy(baseline_params()), &ScanConfig::default()).unwrap();
    assert!(rel_err(r.post.p_star, BASELINE_POST.0) < 1e-9);
    assert!(rel_err(r.post.h_star, BASELINE_POST.1) < 1e-9);
    assert!(r.delta_sigma < 0.0);
}

#[test]
fn without_feedback_only_hash_moves() {
    let r = halving_report(&economy(limiting_params()), &ScanConfig::default()).unwrap();
    assert!(r.delta_h < 0.0);
    assert!(r.delta_p.abs() < 1e-6);
    // uniform costs: H = sqrt(P (B + Phi)) at P = 1
    assert!(rel_err(r.post.h_star, 0.15f64.sqrt()) < 1e-6);
}

#[test]
fn identity_shock_is_not_a_prediction() {
    let r = subsidy_shock_report(&economy(baseline_params()), 1.0, &ScanConfig::default()).unwrap();
    assert_eq!(r.delta_p, 0.0);
    assert_eq!(r.delta_h, 0.0);
    assert_eq!(r.prediction, HalvingPrediction::NotApplicable);
}

#[test]
fn multiplicity_pairs_highest_stable_branch() {
    let r = halving_report(&economy(multiplicity_params()), &ScanConfig::default()).unwrap();
    assert!(!r.uniqueness_pre);
    assert_eq!(r.prediction, HalvingPrediction::NotApplicable);
    assert!(r.selection_note.starts_with("pre: highest-price stable of 3"));
    assert!(r.pre.p_star > 1.0);
}

#[test]
fn subsidy_cut_rejects_bad_inputs() {
    let eco = economy(baseline_params());
    assert!(apply_subsidy_cut(&eco, 0.0).is_err());
    assert!(apply_subsidy_cut(&eco, 1.5).is_err());
    let mut no_subsidy = baseline_params();
    no_subsidy.protocol.b = 0.0;
    assert!(apply_halving(&economy(no_subsidy)).is_err());
    assert_eq!(apply_halving(&eco).unwrap().protocol().b, 0.1);
}
