use fusion_core::{
    alpha_grid, brute_force_count, brute_force_gdfp, check_positive_unate, expand_count_rule,
    roc_sweep, rule_performance, simulate, simulate_count, solve_count_gdfp, solve_gdfp,
    solve_hm_bayes, solve_k_out_of_n, BayesParams, ProblemSpec, SelectedRule, SensorProfile,
    SimConfig, COUNT_SCALE, GDFP_SCALE,
};
use proptest::prelude::*;

fn profile_strategy(max_n: usize) -> impl Strategy<Value = SensorProfile> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..=1.0f64, n),
            prop::collection::vec(0.0..=1.0f64, n),
        )
            .prop_map(|(pd, pf)| SensorProfile::new(pd, pf).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dp_agrees_with_exhaustive_search(
        profile in profile_strategy(4),
        cd in 0.0..2.0f64,
        cf in 0.0..2.0f64,
        alpha in 0.0..=1.0f64,
    ) {
        let spec = ProblemSpec::new(cd, cf, alpha).unwrap();
        let dp = solve_gdfp(&profile, &spec, GDFP_SCALE).unwrap();
        let oracle = brute_force_gdfp(&profile, &spec, true, GDFP_SCALE).unwrap();
        prop_assert!((dp.objective - oracle.objective).abs() <= 1e-12);
        let (pd, pf) = rule_performance(&profile, &dp.rule.expand(profile.len()).unwrap()).unwrap();
        prop_assert!((pd - dp.pd).abs() <= 1e-12 && (pf - dp.pf).abs() <= 1e-12);
    }

    #[test]
    fn count_dp_agrees_with_count_search(
        profile in profile_strategy(8),
        cd in 0.0..2.0f64,
        cf in 0.0..2.0f64,
        alpha in 0.0..=1.0f64,
    ) {
        let spec = ProblemSpec::new(cd, cf, alpha).unwrap();
        let dp = solve_count_gdfp(&profile, &spec, COUNT_SCALE).unwrap();
        let oracle = brute_force_count(&profile, &spec, true, COUNT_SCALE).unwrap();
        prop_assert!((dp.objective - oracle.objective).abs() <= 1e-12);
    }
}

#[test]
fn homogeneous_bayes_rule_is_the_closed_form_threshold() {
    for n in 1..=12 {
        let hm = solve_hm_bayes(0.8, 0.15, n, &BayesParams::min_error(0.5).unwrap()).unwrap();
        let kn = solve_k_out_of_n(0.8, 0.15, n).unwrap();
        assert_eq!(hm.rule, kn.rule, "n = {n}");
        let SelectedRule::Count(y) = &hm.rule else { panic!("count rule expected") };
        assert!(check_positive_unate(&expand_count_rule(y, n).unwrap(), n));
    }
}

#[test]
fn simulated_rates_track_the_analytic_rates() {
    let profile = SensorProfile::new(
        vec![0.85, 0.7, 0.9, 0.65, 0.8],
        vec![0.1, 0.2, 0.15, 0.05, 0.3],
    )
    .unwrap();
    let spec = ProblemSpec::neyman_pearson(0.1).unwrap();
    let config = SimConfig::new(50_000, 3).unwrap();

    let general = solve_gdfp(&profile, &spec, GDFP_SCALE).unwrap();
    let x = general.rule.expand(5).unwrap();
    let sim = simulate(&profile, &x, &config).unwrap();
    assert!((sim.pd_hat - general.pd).abs() <= 4.0 * sim.stderr_pd);
    assert!((sim.pf_hat - general.pf).abs() <= 4.0 * sim.stderr_pf);

    let count = solve_count_gdfp(&profile, &spec, COUNT_SCALE).unwrap();
    let SelectedRule::Count(y) = &count.rule else { panic!("count rule expected") };
    let direct = simulate_count(&profile, y, &config).unwrap();
    assert_eq!(direct, simulate(&profile, &count.rule.expand(5).unwrap(), &config).unwrap());
    assert!((direct.pd_hat - count.pd).abs() <= 4.0 * direct.stderr_pd);
}

#[test]
fn sweep_matches_individual_solves() {
    let profile = SensorProfile::new(vec![0.9, 0.75, 0.6, 0.8], vec![0.2, 0.1, 0.05, 0.3]).unwrap();
    let alphas = alpha_grid(0.05, 0.3, 0.05).unwrap();
    let points = roc_sweep(&profile, &alphas, GDFP_SCALE, false).unwrap();
    for (point, &alpha) in points.iter().zip(&alphas) {
        let solo = solve_gdfp(&profile, &ProblemSpec::neyman_pearson(alpha).unwrap(), GDFP_SCALE).unwrap();
        assert_eq!(point.alpha, alpha);
        assert_eq!(point.pf_star, solo.pf);
        assert_eq!(point.pm_star, solo.pm());
        assert_eq!(point.flops, solo.flops);
    }
}
