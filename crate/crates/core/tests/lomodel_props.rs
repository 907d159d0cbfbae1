mod common;

use common::{close, lo_sweep, random_instance};
use interdict_core::lomodel::{approx_report, lo_cuts, lo_value_at, solve_lo, Verdict};
use interdict_core::solvers::Limits;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lo_value_is_concave(inst in random_instance(7, 1..=3), step in 0.1f64..2.0) {
        let grid: Vec<f64> = (0..30).map(|i| i as f64 * step).collect();
        let values: Vec<f64> = grid.iter().map(|&t| lo_value_at(&inst, t)).collect();
        for w in values.windows(3) {
            prop_assert!(w[1] >= 0.5 * (w[0] + w[2]) - 1e-9);
        }
    }

    #[test]
    fn lo_matches_sweep_and_cuts(inst in random_instance(7, 1..=3)) {
        let sol = solve_lo(&inst).unwrap();
        let oracle = lo_sweep(&inst);
        prop_assert!((sol.value - oracle).abs() <= 1e-7, "{} vs {}", sol.value, oracle);
        prop_assert!(sol.flow.values.iter().all(|&x| x <= sol.theta_star + 1e-9));
        prop_assert!(close(sol.value, sol.flow_value - inst.gamma() as f64 * sol.theta_star, 1e-9));
        let cuts = lo_cuts(&inst, &sol).unwrap();
        prop_assert!(cuts.b() < inst.gamma());
        if sol.theta_star > 0.0 {
            prop_assert!(cuts.a() >= inst.gamma());
        }
    }

    #[test]
    fn report_has_no_failures(inst in random_instance(7, 1..=3)) {
        let report = approx_report(&inst, &Limits::default()).unwrap();
        prop_assert!(!report.partial);
        let failures: Vec<_> = report.bounds.iter().filter(|b| b.verdict == Verdict::Fail).collect();
        prop_assert!(failures.is_empty(), "{:?}", failures);
    }
}
