mod common;

use common::{close, dfs_paths, min_cut_value, random_instance};
use interdict_core::graph::{
    clipped_capacities, decompose, enumerate_paths, max_flow, min_cut, validate_flow,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn max_flow_equals_min_cut(inst in random_instance(7, 1..=3), theta in 0.0f64..10.0) {
        for caps in [inst.capacities().to_vec(), clipped_capacities(inst.capacities(), theta)] {
            let (value, flow) = max_flow(&inst, &caps);
            prop_assert!(close(value, min_cut_value(&inst, &caps), 1e-9));
            prop_assert!(close(flow.value, value, 1e-9));
        }
        let report = min_cut(&inst, inst.capacities(), Some(theta));
        let clipped = clipped_capacities(inst.capacities(), theta);
        prop_assert!(close(report.capacity_at_theta, min_cut_value(&inst, &clipped), 1e-9));
    }

    #[test]
    fn max_flow_is_feasible(inst in random_instance(7, 1..=3)) {
        let (_, flow) = max_flow(&inst, inst.capacities());
        prop_assert!(validate_flow(&inst, &flow).is_feasible());
    }

    #[test]
    fn decomposition_reaccumulates(inst in random_instance(7, 1..=3)) {
        let (value, flow) = max_flow(&inst, inst.capacities());
        let paths = decompose(&inst, &flow);
        prop_assert!(close(paths.value(), value, 1e-9));
        for (load, x) in paths.arc_loads(inst.arc_count()).iter().zip(&flow.values) {
            prop_assert!(*load <= x + 1e-9);
        }
        prop_assert!(validate_flow(&inst, &paths).is_feasible());
    }

    #[test]
    fn path_enumeration_matches_dfs(inst in random_instance(7, 1..=3)) {
        let found = enumerate_paths(&inst, 100_000).unwrap();
        let as_indices: Vec<Vec<usize>> = found.iter().map(|p| p.iter().map(|e| e.0).collect()).collect();
        let unique: std::collections::BTreeSet<Vec<usize>> = as_indices.iter().cloned().collect();
        prop_assert_eq!(unique.len(), as_indices.len());
        prop_assert_eq!(unique, dfs_paths(&inst));
    }
}
