mod common;

use common::{dot, lp_vertex_oracle};
use interdict_core::linopt::{solve_lp, LpProblem, LpStatus, Relation, Sense};
use proptest::prelude::*;

const TOL: f64 = 1e-6;

/// `max c·x` with `Ax ≤ b`, `0 ≤ x ≤ upper`; `b ≥ 0` keeps it feasible.
fn packing_lp(max_vars: usize, max_rows: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>)> {
    (1..=max_vars, 1..=max_rows).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec(prop::collection::vec(-4i32..=6, n), m),
            prop::collection::vec(0i32..=10, m),
        )
            .prop_map(|(c, a, b)| {
                let f = |v: Vec<i32>| v.into_iter().map(f64::from).collect::<Vec<f64>>();
                (f(c), a.into_iter().map(f).collect(), f(b))
            })
    })
}

fn build(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: f64) -> LpProblem {
    let mut lp = LpProblem::new(Sense::Maximize, c.len());
    for (j, &cj) in c.iter().enumerate() {
        lp.set_objective(j, cj);
        lp.set_bounds(j, 0.0, upper);
    }
    for (row, &rhs) in a.iter().zip(b) {
        let coeffs = row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, v)| (j, *v)).collect();
        lp.add_row(coeffs, Relation::Le, rhs);
    }
    lp
}

/// Primal and dual feasibility, complementary slackness and equal objectives.
fn check_optimality(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: f64) -> Result<f64, TestCaseError> {
    let sol = solve_lp(&build(c, a, b, upper)).unwrap();
    prop_assert_eq!(sol.status, LpStatus::Optimal);
    let x = &sol.primal;
    let y = &sol.duals;
    for (row, &rhs) in a.iter().zip(b) {
        prop_assert!(dot(row, x) <= rhs + TOL);
    }
    for &xj in x {
        prop_assert!(xj >= -TOL && xj <= upper + TOL);
    }
    for (i, (row, &rhs)) in a.iter().zip(b).enumerate() {
        prop_assert!(y[i] >= -TOL, "dual {} negative", y[i]);
        prop_assert!(y[i] * (rhs - dot(row, x)) <= TOL * (1.0 + rhs.abs()));
    }
    // Reduced cost d_j: positive only at the upper bound, negative only at zero.
    let mut bound_dual = 0.0;
    for (j, &xj) in x.iter().enumerate() {
        let d = c[j] - a.iter().zip(y).map(|(row, yi)| row[j] * yi).sum::<f64>();
        prop_assert!((d - sol.reduced_costs[j]).abs() <= TOL);
        if d > TOL {
            prop_assert!((xj - upper).abs() <= TOL);
        }
        if d < -TOL {
            prop_assert!(xj.abs() <= TOL);
        }
        bound_dual += d.max(0.0) * upper;
    }
    let dual_objective = dot(y, b) + bound_dual;
    prop_assert!((dual_objective - sol.objective).abs() <= TOL * (1.0 + sol.objective.abs()));
    prop_assert!((dot(c, x) - sol.objective).abs() <= TOL * (1.0 + sol.objective.abs()));
    Ok(sol.objective)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matches_vertex_enumeration((c, a, b) in packing_lp(6, 5)) {
        let value = check_optimality(&c, &a, &b, 5.0)?;
        let oracle = lp_vertex_oracle(&c, &a, &b, 5.0).unwrap();
        prop_assert!((value - oracle).abs() <= TOL * (1.0 + oracle.abs()), "{} vs {}", value, oracle);
    }

    #[test]
    fn larger_lps_satisfy_duality((c, a, b) in packing_lp(20, 20)) {
        check_optimality(&c, &a, &b, 7.0)?;
    }

    #[test]
    fn minimization_mirrors_maximization((c, a, b) in packing_lp(6, 5)) {
        let max = solve_lp(&build(&c, &a, &b, 5.0)).unwrap();
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        let mut lp = LpProblem::new(Sense::Minimize, 0);
        for &cj in &neg {
            lp.add_var(cj, 0.0, 5.0);
        }
        for row in build(&c, &a, &b, 5.0).rows() {
            lp.add_row(row.coeffs.clone(), row.relation, row.rhs);
        }
        let min = solve_lp(&lp).unwrap();
        prop_assert!((min.objective + max.objective).abs() <= TOL * (1.0 + max.objective.abs()));
    }
}
