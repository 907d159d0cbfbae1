//! Dense two-phase tableau simplex with primal and dual solutions.
//!
//! Problems are stated with arbitrary variable bounds and `≤ / = / ≥` rows,
//! then rewritten into `min c'x', A'x' = b', x' ≥ 0` with slack, surplus and
//! artificial columns. Finite upper bounds become explicit rows.
//!
//! Dual values follow the shadow-price convention of the problem as stated:
//! `duals[i] = ∂ objective / ∂ rhs[i]`. For a maximization, `≤` rows have
//! nonnegative duals; for a minimization, `≥` rows do. Reduced costs are
//! `c_j − Σ_i duals[i]·a_ij`, so that `objective = Σ_i rhs[i]·duals[i] +
//! Σ_j reduced_costs[j]·x_j` at an optimum.

use crate::error::{Error, Result};

pub const PIVOT_TOLERANCE: f64 = 1e-10;
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
const OPTIMALITY_TOLERANCE: f64 = 1e-9;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_STREAK_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    sense: Sense,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl LpProblem {
    /// `num_vars` variables with zero cost and bounds `[0, ∞)`.
    pub fn new(sense: Sense, num_vars: usize) -> Self {
        LpProblem {
            sense,
            objective: vec![0.0; num_vars],
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coeff: f64) {
        self.objective[var] = coeff;
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, relation: Relation, rhs: f64) -> usize {
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::MalformedLp(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
            if !self.objective[j].is_finite() {
                return Err(Error::MalformedLp(format!("variable {j} has non-finite cost")));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::MalformedLp(format!("row {i} has non-finite rhs")));
            }
            for &(j, a) in &row.coeffs {
                if j >= n || !a.is_finite() {
                    return Err(Error::MalformedLp(format!("row {i} has a bad coefficient")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One per constraint row (shadow prices), empty unless optimal.
    pub duals: Vec<f64>,
    /// One per variable, empty unless optimal.
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn without_values(status: LpStatus, num_vars: usize) -> Self {
        LpSolution {
            status,
            primal: vec![0.0; num_vars],
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NAN,
            },
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// How an original variable maps onto nonnegative standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// x = offset + x'
    Shifted { col: usize, offset: f64 },
    /// x = offset − x'
    Mirrored { col: usize, offset: f64 },
    /// x = x⁺ − x⁻
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// Row-major `rows × width`; the last column holds the right-hand side.
    data: Vec<f64>,
    rows: usize,
    width: usize,
    basis: Vec<usize>,
    /// Reduced costs over all columns; the last entry is `−objective`.
    cost_row: Vec<f64>,
    barred: Vec<bool>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        let w = self.width;
        self.cost_row = costs.to_vec();
        self.cost_row.push(0.0);
        for i in 0..self.rows {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (d, a) in self.cost_row.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= p;
            }
            row[c] = 1.0;
        }
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let factor = self.data[i * w + c];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pr;
            }
            row[c] = 0.0;
            let rhs = &mut row[w - 1];
            if *rhs < 0.0 && *rhs > -FEASIBILITY_TOLERANCE {
                *rhs = 0.0;
            }
        }
        let factor = self.cost_row[c];
        if factor != 0.0 {
            for (d, pr) in self.cost_row.iter_mut().zip(&pivot_row) {
                *d -= factor * pr;
            }
            self.cost_row[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the current cost row until optimal or unbounded.
    fn optimize(&mut self, max_iters: usize) -> Result<bool> {
        let cols = self.width - 1;
        let mut degenerate_streak = 0usize;
        let mut bland = false;
        for _ in 0..max_iters {
            let entering = if bland {
                (0..cols).find(|&j| !self.barred[j] && self.cost_row[j] < -OPTIMALITY_TOLERANCE)
            } else {
                (0..cols)
                    .filter(|&j| !self.barred[j] && self.cost_row[j] < -OPTIMALITY_TOLERANCE)
                    .min_by(|&a, &b| self.cost_row[a].total_cmp(&self.cost_row[b]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a <= PIVOT_TOLERANCE {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        let better = if tie {
                            if bland {
                                self.basis[i] < self.basis[k]
                            } else {
                                a > self.at(k, c)
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((r, ratio)) = leave else {
                return Ok(false);
            };
            if ratio <= 1e-12 {
                degenerate_streak += 1;
                if degenerate_streak >= DEGENERATE_STREAK_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::NumericalFailure(format!(
            "simplex did not terminate within {max_iters} pivots"
        )))
    }
}

type StdRow = (Vec<(usize, f64)>, Relation, f64);

/// Solves a linear program. Infeasible and unbounded problems are reported
/// through [`LpSolution::status`]; `Err` means the pivoting could not
/// certify any status.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    problem.check()?;
    let n = problem.num_vars();

    // Map variables to standard columns.
    let mut maps = Vec::with_capacity(n);
    let mut std_cols = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        let (lo, hi) = (problem.lower[j], problem.upper[j]);
        let map = if lo.is_finite() {
            let col = std_cols;
            std_cols += 1;
            if hi.is_finite() {
                bound_rows.push((col, hi - lo));
            }
            VarMap::Shifted { col, offset: lo }
        } else if hi.is_finite() {
            let col = std_cols;
            std_cols += 1;
            VarMap::Mirrored { col, offset: hi }
        } else {
            let pos = std_cols;
            std_cols += 2;
            VarMap::Split { pos, neg: pos + 1 }
        };
        maps.push(map);
    }

    // Standard-form rows: coefficients over std columns, relation, rhs.
    let mut std_rows: Vec<StdRow> = Vec::new();
    for row in &problem.rows {
        let mut coeffs = Vec::with_capacity(row.coeffs.len());
        let mut rhs = row.rhs;
        for &(j, a) in &row.coeffs {
            match maps[j] {
                VarMap::Shifted { col, offset } => {
                    rhs -= a * offset;
                    coeffs.push((col, a));
                }
                VarMap::Mirrored { col, offset } => {
                    rhs -= a * offset;
                    coeffs.push((col, -a));
                }
                VarMap::Split { pos, neg } => {
                    coeffs.push((pos, a));
                    coeffs.push((neg, -a));
                }
            }
        }
        std_rows.push((coeffs, row.relation, rhs));
    }
    for &(col, width) in &bound_rows {
        std_rows.push((vec![(col, 1.0)], Relation::Le, width));
    }

    let mut std_cost = vec![0.0; std_cols];
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    for (j, map) in maps.iter().enumerate() {
        let c = sign * problem.objective[j];
        match *map {
            VarMap::Shifted { col, .. } => std_cost[col] += c,
            VarMap::Mirrored { col, .. } => std_cost[col] -= c,
            VarMap::Split { pos, neg } => {
                std_cost[pos] += c;
                std_cost[neg] -= c;
            }
        }
    }

    // Tableau layout: std columns | slack/surplus | artificial | rhs.
    let m = std_rows.len();
    let mut flips = vec![1.0; m];
    let mut relations = Vec::with_capacity(m);
    for (i, (_, rel, rhs)) in std_rows.iter().enumerate() {
        let mut rel = *rel;
        if *rhs < 0.0 {
            flips[i] = -1.0;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        relations.push(rel);
    }
    let slack_count = relations.iter().filter(|r| **r != Relation::Eq).count();
    let art_count = relations.iter().filter(|r| **r != Relation::Le).count();
    let slack_base = std_cols;
    let art_base = std_cols + slack_count;
    let cols = art_base + art_count;
    let width = cols + 1;

    let mut data = vec![0.0; m * width];
    let mut basis = vec![0usize; m];
    let mut identity_col = vec![0usize; m];
    let (mut next_slack, mut next_art) = (slack_base, art_base);
    for (i, (coeffs, _, rhs)) in std_rows.iter().enumerate() {
        let row = &mut data[i * width..(i + 1) * width];
        for &(col, a) in coeffs {
            row[col] += flips[i] * a;
        }
        row[cols] = flips[i] * rhs;
        match relations[i] {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis[i] = next_slack;
                identity_col[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis[i] = next_art;
                identity_col[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut tab = Tableau {
        data,
        rows: m,
        width,
        basis,
        cost_row: Vec::new(),
        barred: vec![false; cols],
    };
    let max_iters = 50_000 + 200 * (m + cols);

    // Phase 1.
    if art_count > 0 {
        let mut phase1 = vec![0.0; cols];
        for c in phase1.iter_mut().skip(art_base) {
            *c = 1.0;
        }
        tab.set_costs(&phase1);
        tab.optimize(max_iters)?;
        let infeasibility = -tab.cost_row[cols];
        let scale = 1.0 + (0..m).map(|i| tab.rhs(i).abs()).fold(0.0, f64::max);
        let b_scale = 1.0
            + std_rows
                .iter()
                .map(|(_, _, rhs)| rhs.abs())
                .fold(0.0, f64::max);
        if infeasibility > FEASIBILITY_TOLERANCE * scale.max(b_scale) {
            return Ok(LpSolution::without_values(LpStatus::Infeasible, n));
        }
        // Drive remaining artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] < art_base {
                continue;
            }
            if let Some(c) = (0..art_base).find(|&j| tab.at(i, j).abs() > PIVOT_TOLERANCE) {
                tab.pivot(i, c);
            }
        }
        for j in art_base..cols {
            tab.barred[j] = true;
        }
    }

    // Phase 2.
    let mut phase2 = vec![0.0; cols];
    phase2[..std_cols].copy_from_slice(&std_cost);
    tab.set_costs(&phase2);
    if !tab.optimize(max_iters)? {
        return Ok(LpSolution::without_values(LpStatus::Unbounded, n));
    }

    let mut std_x = vec![0.0; cols];
    for i in 0..m {
        std_x[tab.basis[i]] = tab.rhs(i).max(0.0);
    }
    let primal: Vec<f64> = maps
        .iter()
        .enumerate()
        .map(|(j, map)| {
            let v = match *map {
                VarMap::Shifted { col, offset } => offset + std_x[col],
                VarMap::Mirrored { col, offset } => offset - std_x[col],
                VarMap::Split { pos, neg } => std_x[pos] - std_x[neg],
            };
            v.clamp(problem.lower[j], problem.upper[j])
        })
        .collect();

    // y_std[i] = −d[identity column]; undo the row flip and the sense change.
    let duals: Vec<f64> = (0..problem.rows.len())
        .map(|i| -tab.cost_row[identity_col[i]] * flips[i] * sign)
        .collect();
    let mut reduced_costs = problem.objective.clone();
    for (row, &y) in problem.rows.iter().zip(&duals) {
        for &(j, a) in &row.coeffs {
            reduced_costs[j] -= y * a;
        }
    }
    let objective = problem.objective_value(&primal);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        duals,
        reduced_costs,
        objective,
    })
}

/// Among optimal solutions of `problem`, optimizes a secondary objective.
///
/// The primary optimum is fixed by an extra row `c·x ≥ z* − tol` (or `≤`
/// for minimization) with `tol = 1e-9·(1+|z*|)`. The returned solution
/// reports the primary objective value; its duals and reduced costs belong
/// to the secondary solve, restricted to the original rows.
pub fn solve_lp_lexicographic(
    problem: &LpProblem,
    secondary_sense: Sense,
    secondary: &[f64],
) -> Result<LpSolution> {
    if secondary.len() != problem.num_vars() {
        return Err(Error::MalformedLp("secondary objective length".into()));
    }
    let first = solve_lp(problem)?;
    if !first.is_optimal() {
        return Ok(first);
    }
    let z = first.objective;
    let tol = 1e-9 * (1.0 + z.abs());
    let mut fixed = problem.clone();
    let coeffs: Vec<(usize, f64)> = problem
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, *c))
        .collect();
    match problem.sense {
        Sense::Maximize => fixed.add_row(coeffs, Relation::Ge, z - tol),
        Sense::Minimize => fixed.add_row(coeffs, Relation::Le, z + tol),
    };
    fixed.sense = secondary_sense;
    fixed.objective = secondary.to_vec();
    let mut second = solve_lp(&fixed)?;
    match second.status {
        LpStatus::Optimal => {
            second.duals.truncate(problem.rows.len());
            second.objective = problem.objective_value(&second.primal);
            Ok(second)
        }
        LpStatus::Unbounded => Ok(second),
        LpStatus::Infeasible => Err(Error::NumericalFailure(
            "primary optimum became infeasible when fixed".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_single_variable() {
        let mut lp = LpProblem::new(Sense::Maximize, 1);
        lp.set_objective(0, 1.0);
        lp.set_bounds(0, 0.0, 5.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 5.0).abs() < 1e-12);
        assert!((sol.objective - 5.0).abs() < 1e-12);
        assert!((sol.reduced_costs[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_dual_is_shadow_price() {
        let mut lp = LpProblem::new(Sense::Maximize, 2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LpProblem::new(Sense::Minimize, 1);
        lp.add_row(vec![(0, 1.0)], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn detects_unbounded() {
        let mut lp = LpProblem::new(Sense::Maximize, 2);
        lp.set_objective(0, 1.0);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_mirrored_variables() {
        // min x + y with x free, y ≤ 3 (no lower bound), x ≥ y − 2, x + y ≥ −4, y ≥ −10
        let mut lp = LpProblem::new(Sense::Minimize, 2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, 3.0);
        lp.add_row(vec![(0, 1.0), (1, -1.0)], Relation::Ge, -2.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Ge, -4.0);
        lp.add_row(vec![(1, 1.0)], Relation::Ge, -10.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective + 4.0).abs() < 1e-9);
        assert!((sol.duals[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // x + y = 2 stated twice; max x subject to x ≤ 1.5.
        let mut lp = LpProblem::new(Sense::Maximize, 2);
        lp.set_objective(0, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Eq, 2.0);
        lp.add_row(vec![(0, 2.0), (1, 2.0)], Relation::Eq, 4.0);
        lp.add_row(vec![(0, 1.0)], Relation::Le, 1.5);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 1.5).abs() < 1e-9);
        assert!((sol.primal[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn lexicographic_prefers_secondary() {
        let mut lp = LpProblem::new(Sense::Maximize, 2);
        lp.set_objective(0, 1.0);
        lp.set_objective(1, 1.0);
        lp.set_bounds(0, 0.0, 2.0);
        lp.set_bounds(1, 0.0, 2.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0);
        let sol = solve_lp_lexicographic(&lp, Sense::Maximize, &[0.0, 1.0]).unwrap();
        assert!(sol.primal[0].abs() < 1e-8);
        assert!((sol.primal[1] - 2.0).abs() < 1e-8);
        assert!((sol.objective - 2.0).abs() < 1e-8);
    }

    #[test]
    fn lexicographic_keeps_unique_optimum() {
        let mut lp = LpProblem::new(Sense::Maximize, 2);
        lp.set_objective(0, 2.0);
        lp.set_objective(1, 1.0);
        lp.add_row(vec![(0, 1.0), (1, 1.0)], Relation::Le, 2.0);
        lp.add_row(vec![(0, 1.0)], Relation::Le, 1.0);
        let plain = solve_lp(&lp).unwrap();
        let lex = solve_lp_lexicographic(&lp, Sense::Minimize, &[0.0, 1.0]).unwrap();
        assert!((plain.primal[0] - lex.primal[0]).abs() < 1e-8);
        assert!((plain.primal[1] - lex.primal[1]).abs() < 1e-8);
        assert!((lex.objective - 3.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_malformed_bounds() {
        let mut lp = LpProblem::new(Sense::Maximize, 1);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::MalformedLp(_))));
    }
}
