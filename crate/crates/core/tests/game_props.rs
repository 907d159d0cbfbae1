mod common;

use common::{close, random_instance};
use interdict_core::game::{
    adaptive_value, adaptive_value_by_cuts, estimate_expected_payoff, expected_payoff, payoff_arc,
    payoff_path, scenarios, MixedStrategy, Scenario,
};
use interdict_core::graph::{decompose, max_flow, ArcFlow, Instance};
use proptest::prelude::*;

const LIMIT: usize = 100_000;

/// A feasible flow scaled down from the max flow.
fn scaled_flow(inst: &Instance, scale: f64) -> ArcFlow {
    let (_, flow) = max_flow(inst, inst.capacities());
    ArcFlow::new(inst, flow.values.iter().map(|v| v * scale).collect())
}

fn strategy_from(inst: &Instance, weights: &[u8]) -> MixedStrategy {
    let omega: Vec<Scenario> = scenarios(inst, LIMIT).unwrap().collect();
    let picked: Vec<(Scenario, f64)> = omega
        .into_iter()
        .zip(weights.iter().cycle())
        .filter(|(_, w)| **w > 0)
        .map(|(s, w)| (s, f64::from(*w)))
        .collect();
    let total: f64 = picked.iter().map(|(_, w)| w).sum();
    MixedStrategy::new(picked.into_iter().map(|(s, w)| (s, w / total)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn path_payoff_below_arc_payoff(inst in random_instance(7, 1..=3), scale in 0.2f64..=1.0) {
        let x = scaled_flow(&inst, scale);
        let paths = decompose(&inst, &x);
        for mu in scenarios(&inst, LIMIT).unwrap() {
            let g = payoff_path(&mu, &paths);
            let f = payoff_arc(&inst, &mu, &x);
            prop_assert!(g >= 0.0);
            prop_assert!(g <= f + 1e-9);
            prop_assert!(f <= x.value + 1e-9);
        }
    }

    #[test]
    fn adaptive_value_matches_cut_formula(inst in random_instance(7, 1..=3), scale in 0.2f64..=1.0) {
        let x = scaled_flow(&inst, scale);
        let by_scenarios = adaptive_value(&inst, &x, LIMIT).unwrap().value;
        let by_cuts = adaptive_value_by_cuts(&inst, &x).unwrap();
        prop_assert!(close(by_scenarios, by_cuts, 1e-9), "{} vs {}", by_scenarios, by_cuts);
    }

    #[test]
    fn expected_payoff_is_linear(
        inst in random_instance(6, 1..=2),
        w1 in prop::collection::vec(1u8..=5, 1..6),
        w2 in prop::collection::vec(0u8..=5, 1..6),
        lambda in 0.0f64..=1.0,
    ) {
        prop_assume!(w2.iter().any(|w| *w > 0));
        let x = scaled_flow(&inst, 1.0);
        let a1 = strategy_from(&inst, &w1);
        let a2 = strategy_from(&inst, &w2);
        let mixed = a1.mix(&a2, lambda).unwrap();
        let lhs = expected_payoff(&inst, &mixed, &x);
        let rhs = lambda * expected_payoff(&inst, &a1, &x) + (1.0 - lambda) * expected_payoff(&inst, &a2, &x);
        prop_assert!(close(lhs, rhs, 1e-9));
    }
}

#[test]
fn monte_carlo_is_unbiased_over_seeds() {
    let inst = common::corpus_instance(3, 2);
    let x = scaled_flow(&inst, 1.0);
    let alpha = strategy_from(&inst, &[3, 0, 1, 2, 0, 5, 1]);
    let exact = expected_payoff(&inst, &alpha, &x);
    let estimates: Vec<_> = (0..50)
        .map(|seed| estimate_expected_payoff(&inst, &alpha, &x, 500, seed).unwrap())
        .collect();
    let pooled_mean = estimates.iter().map(|e| e.mean).sum::<f64>() / 50.0;
    let pooled_se = (estimates.iter().map(|e| e.std_error.powi(2)).sum::<f64>()).sqrt() / 50.0;
    assert!(
        (pooled_mean - exact).abs() < 4.0 * pooled_se.max(1e-12),
        "mean {pooled_mean} exact {exact} se {pooled_se}"
    );
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let inst = common::corpus_instance(5, 1);
    let x = scaled_flow(&inst, 1.0);
    let alpha = strategy_from(&inst, &[1, 2, 3]);
    let a = estimate_expected_payoff(&inst, &alpha, &x, 1000, 42).unwrap();
    let b = estimate_expected_payoff(&inst, &alpha, &x, 1000, 42).unwrap();
    assert_eq!(a, b);
}
