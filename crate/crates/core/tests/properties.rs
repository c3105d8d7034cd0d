use proptest::prelude::*;

use prefbandit::harness::ExperimentConfig;
use prefbandit::offline_data::{logistic, softplus, OfflineDataset, PreferenceTuple, SamplingDistribution};
use prefbandit::theory::{bound_constants, build_info_set, coupon_all_prob};

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    (
        (2usize..20, 1usize..6, 1usize..1000, 0usize..500),
        (1e-3f64..100.0, prop_oneof![Just(f64::INFINITY), 1e-3f64..100.0]),
        (1e-3f64..5.0, 0.0f64..0.99, 1usize..20, any::<u64>()),
        proptest::collection::vec(-10.0f64..10.0, 6),
    )
        .prop_map(|((k, d, horizon, n), (true_beta, true_lambda), (sigma, rho, seeds, base_seed), mean)| {
            ExperimentConfig {
                k,
                d,
                horizon,
                n,
                true_beta,
                true_lambda,
                sigma,
                rho,
                seeds,
                base_seed,
                prior_mean: Some(mean[..d].to_vec()),
                ..ExperimentConfig::default()
            }
        })
}

proptest! {
    #[test]
    fn config_text_round_trips(cfg in config_strategy()) {
        let text = cfg.serialize();
        let back = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.serialize(), text);
    }

    #[test]
    fn logistic_and_softplus_identities(x in -700.0f64..700.0) {
        prop_assert_eq!(logistic(x) + logistic(-x), 1.0);
        let diff = softplus(x) - softplus(-x);
        prop_assert!((diff - x).abs() <= 1e-12 * (1.0 + x.abs()));
        prop_assert!(softplus(x) >= 0.0 && softplus(x) >= x);
    }

    #[test]
    fn coupon_probability_grows_with_draws(n in 1usize..12, draws in 0usize..200) {
        let p = coupon_all_prob(n, draws).unwrap();
        let q = coupon_all_prob(n, draws + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(q >= p - 1e-12);
        if draws < n {
            prop_assert!(p.abs() < 1e-9);
        }
    }

    #[test]
    fn info_set_excludes_exactly_the_losers(
        k in 2usize..10,
        raw in proptest::collection::vec((0usize..100, 0usize..100, 0u8..2), 0..60),
    ) {
        let tuples: Vec<PreferenceTuple> = raw
            .iter()
            .map(|&(a, b, y)| PreferenceTuple::new(a % k, b % k, y).unwrap())
            .collect();
        let d0 = OfflineDataset::new(tuples.clone(), SamplingDistribution::uniform(k).unwrap()).unwrap();
        let u = build_info_set(&d0, k);
        prop_assert!(u.len() <= k);
        for arm in 0..k {
            let lost = tuples.iter().any(|t| !t.is_self_comparison() && t.loser() == arm);
            prop_assert_eq!(u.contains(arm), !lost);
        }
    }

    #[test]
    fn expected_info_set_size_is_capped_by_k(
        n in 0usize..2000,
        k in 2usize..50,
        beta in 1e-2f64..100.0,
        lambda in prop_oneof![Just(f64::INFINITY), 1e-2f64..100.0],
        d in 1usize..10,
    ) {
        let mu = 1.0 / (k * k) as f64;
        let c = bound_constants(n, k, 1000, beta, lambda, d, mu).unwrap();
        prop_assert!(c.f2 <= k as f64);
        prop_assert_eq!(c.f2, c.f2_unclamped.min(k as f64));
        prop_assert!(c.f1 >= 0.0);
    }
}
