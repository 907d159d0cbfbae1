//! Exact solvers for the nominal, randomized and path-based interdiction
//! games, the Γ=1 cut LP, best responses and saddle-point certificates.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, check_scenario_limit, scenarios, MixedStrategy, Scenario};
use crate::graph::{self, ArcFlow, ArcId, FlowRef, Instance, Path, PathFlow};
use crate::linopt::{solve_lp, LpProblem, LpSolution, Relation, Sense};

pub const DEFAULT_LP_SCENARIO_LIMIT: usize = 2_000;
pub const DEFAULT_PATH_LIMIT: usize = 20_000;
pub const CERTIFICATE_TOLERANCE: f64 = 1e-6;

/// Cut rows added per separation round.
const ROWS_PER_ROUND: usize = 25;
const MAX_ROUNDS: usize = 2_000;
const DUST: f64 = 1e-12;

/// Size limits shared by every solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Scenarios enumerated by `solve_ni` and the adaptive-value checks.
    pub scenario: usize,
    /// Scenarios admitted into an LP.
    pub lp_scenario: usize,
    pub path: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            scenario: game::DEFAULT_SCENARIO_LIMIT,
            lp_scenario: DEFAULT_LP_SCENARIO_LIMIT,
            path: DEFAULT_PATH_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NiSolution {
    pub value: f64,
    pub witness_scenario: Scenario,
    pub witness_flow: ArcFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowModel {
    Arc,
    Path,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Witness {
    Arc(ArcFlow),
    Path(PathFlow),
}

impl Witness {
    pub fn model(&self) -> FlowModel {
        match self {
            Witness::Arc(_) => FlowModel::Arc,
            Witness::Path(_) => FlowModel::Path,
        }
    }

    pub fn as_flow_ref(&self) -> FlowRef<'_> {
        match self {
            Witness::Arc(f) => FlowRef::Arc(f),
            Witness::Path(p) => FlowRef::Path(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RniSolution {
    pub value: f64,
    pub strategy: MixedStrategy,
    pub witness: Witness,
    /// Inner flows `y^μ` for the support scenarios (arc model only).
    pub scenario_flows: Vec<(Scenario, ArcFlow)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gamma1Solution {
    pub value: f64,
    pub alpha: Vec<f64>,
    pub rho: Vec<f64>,
    pub pi: Vec<f64>,
    /// Optimal arc flow read from the duals of the per-arc rows.
    pub flow: ArcFlow,
}

const GAMMA1_TOLERANCE: f64 = 1e-7;

impl Gamma1Solution {
    /// Checks sign, simplex, per-arc, potential and objective conditions.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        let tol = GAMMA1_TOLERANCE;
        let fail = |msg: String| Err(Error::InvariantViolation(msg));
        let alpha_sum: f64 = self.alpha.iter().sum();
        if (alpha_sum - 1.0).abs() > tol {
            return fail(format!("Σα = {alpha_sum}"));
        }
        if let Some(a) = self.alpha.iter().chain(&self.rho).find(|&&a| a < -tol) {
            return fail(format!("negative α or ρ entry {a}"));
        }
        for (i, arc) in instance.arcs().iter().enumerate() {
            let lhs = self.rho[i] + self.alpha[i] + self.pi[arc.tail] - self.pi[arc.head];
            if lhs < -tol {
                return fail(format!("row of {} is {lhs}", ArcId(i)));
            }
        }
        let lift = self.pi[instance.sink()] - self.pi[instance.source()];
        if lift < 1.0 - tol {
            return fail(format!("π_t − π_s = {lift}"));
        }
        let objective: f64 = instance.capacities().iter().zip(&self.rho).map(|(u, r)| u * r).sum();
        if (objective - self.value).abs() > tol * (1.0 + self.value.abs()) {
            return fail(format!("Σ u·ρ = {objective} but value = {}", self.value));
        }
        Ok(())
    }

    /// Per-arc removal probabilities as single-arc scenarios.
    pub fn strategy(&self) -> Result<MixedStrategy> {
        let weights = self
            .alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| (Scenario::new(vec![ArcId(i)]).expect("single arc"), a))
            .collect();
        strategy_from_weights(weights)
    }

    /// The same equilibrium as an arc-model [`RniSolution`].
    pub fn to_rni(&self) -> Result<RniSolution> {
        Ok(RniSolution {
            value: self.value,
            strategy: self.strategy()?,
            witness: Witness::Arc(self.flow.clone()),
            scenario_flows: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateReport {
    pub model: FlowModel,
    /// `value − min_μ payoff(μ, witness)`.
    pub flow_gap: f64,
    /// `best_response(α*) − value`.
    pub adversary_gap: f64,
    pub pass: bool,
}

/// Clips negatives, drops dust and rescales to a probability vector.
fn strategy_from_weights(weights: Vec<(Scenario, f64)>) -> Result<MixedStrategy> {
    let kept: Vec<(Scenario, f64)> = weights
        .into_iter()
        .map(|(s, w)| (s, w.max(0.0)))
        .filter(|(_, w)| *w > DUST)
        .collect();
    let total: f64 = kept.iter().map(|(_, w)| w).sum();
    if total <= DUST {
        return Err(Error::NumericalFailure("dual weights vanish".into()));
    }
    MixedStrategy::new(kept.into_iter().map(|(s, w)| (s, w / total)).collect())
}

fn require_optimal(sol: LpSolution, what: &str) -> Result<LpSolution> {
    if sol.is_optimal() {
        Ok(sol)
    } else {
        Err(Error::NumericalFailure(format!("{what} LP ended {:?}", sol.status)))
    }
}

/// Flow conservation rows over arc variables `offset..offset+m`.
fn add_conservation(lp: &mut LpProblem, instance: &Instance, offset: usize) {
    for v in 0..instance.node_count() {
        if v == instance.source() || v == instance.sink() {
            continue;
        }
        let coeffs: Vec<(usize, f64)> = instance
            .arcs()
            .iter()
            .enumerate()
            .filter_map(|(i, a)| {
                if a.head == v {
                    Some((offset + i, 1.0))
                } else if a.tail == v {
                    Some((offset + i, -1.0))
                } else {
                    None
                }
            })
            .collect();
        if !coeffs.is_empty() {
            lp.add_row(coeffs, Relation::Eq, 0.0);
        }
    }
}

fn clean_arc_flow(instance: &Instance, raw: &[f64]) -> ArcFlow {
    let caps = instance.capacities();
    let values = raw
        .iter()
        .zip(caps)
        .map(|(&x, &u)| if x.abs() < 1e-11 { 0.0 } else { x.clamp(0.0, u) })
        .collect();
    ArcFlow::new(instance, values)
}

/// Z_NI by scenario enumeration. The first minimizing scenario wins ties.
pub fn solve_ni(instance: &Instance, limits: &Limits) -> Result<NiSolution> {
    let caps = instance.capacities();
    let mut best: Option<(f64, Scenario)> = None;
    for scenario in scenarios(instance, limits.scenario)? {
        let (value, _) = graph::max_flow(instance, &scenario.surviving(caps));
        let improves = match &best {
            None => true,
            Some((b, _)) => value < b - 1e-12 * (1.0 + b.abs()),
        };
        if improves {
            best = Some((value, scenario));
        }
    }
    let (value, witness_scenario) = best.expect("Ω is nonempty");
    let (_, witness_flow) = graph::max_flow(instance, &witness_scenario.surviving(caps));
    Ok(NiSolution {
        value,
        witness_scenario,
        witness_flow,
    })
}

/// Cut row `Σ_{e∈δ⁺(S)\E(μ)} x_e` as `(arc index, 1.0)` coefficients.
fn cut_coeffs(instance: &Instance, scenario: &Scenario, in_s: &[bool], offset: usize) -> Vec<(usize, f64)> {
    instance
        .arcs()
        .iter()
        .enumerate()
        .filter(|(i, a)| in_s[a.tail] && !in_s[a.head] && !scenario.removes(ArcId(*i)))
        .map(|(i, _)| (offset + i, 1.0))
        .collect()
}

/// One separation pass: `(scenario index, f(μ,x), minimal cut mask)` for each μ.
fn separate(instance: &Instance, omega: &[Scenario], x: &[f64]) -> Vec<(usize, f64, Vec<bool>)> {
    omega
        .iter()
        .enumerate()
        .map(|(k, mu)| {
            let (value, _, in_s) = graph::max_flow_with_cut(instance, &mu.surviving(x));
            (k, value, in_s)
        })
        .collect()
}

fn converged(worst: f64, bound: f64) -> bool {
    worst >= bound - 1e-9 * (1.0 + bound.abs())
}

/// Z_RNI = Z_ADP with an optimal mixed interdiction.
///
/// Solves `max z` over `x ∈ X` subject to `z ≤ Σ_{e∈δ⁺(S)\E(μ)} x_e` for
/// every scenario μ and cut S. Rows are generated lazily from the minimal
/// min cut of each scenario's surviving network. The interdictor's
/// probability on μ is the total dual weight of μ's rows.
pub fn solve_rni(instance: &Instance, limits: &Limits) -> Result<RniSolution> {
    check_scenario_limit(instance, limits.lp_scenario)?;
    let omega: Vec<Scenario> = scenarios(instance, limits.lp_scenario)?.collect();
    let m = instance.arc_count();
    let nominal = graph::nominal_max_flow(instance);

    let mut lp = LpProblem::new(Sense::Maximize, 0);
    for &u in instance.capacities() {
        lp.add_var(0.0, 0.0, u);
    }
    let z = lp.add_var(1.0, f64::NEG_INFINITY, nominal + 1.0);
    add_conservation(&mut lp, instance, 0);
    let base_rows = lp.rows().len();
    let mut row_owner: Vec<usize> = Vec::new();
    let mut seen: HashSet<(usize, Vec<bool>)> = HashSet::new();

    for _ in 0..MAX_ROUNDS {
        let sol = require_optimal(solve_lp(&lp)?, "randomized interdiction")?;
        let bound = sol.primal[z];
        let x = &sol.primal[..m];
        let mut cuts = separate(instance, &omega, x);
        let worst = cuts.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        if converged(worst, bound) {
            let weights = omega
                .iter()
                .enumerate()
                .map(|(k, mu)| {
                    let w = row_owner
                        .iter()
                        .enumerate()
                        .filter(|(_, &owner)| owner == k)
                        .map(|(r, _)| sol.duals[base_rows + r])
                        .sum();
                    (mu.clone(), w)
                })
                .collect();
            let strategy = strategy_from_weights(weights)?;
            let flow = clean_arc_flow(instance, x);
            let scenario_flows = strategy
                .support()
                .iter()
                .map(|(mu, _)| (mu.clone(), graph::max_flow(instance, &mu.surviving(&flow.values)).1))
                .collect();
            return Ok(RniSolution {
                value: bound,
                strategy,
                witness: Witness::Arc(flow),
                scenario_flows,
            });
        }
        cuts.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut added = 0;
        for (k, value, in_s) in cuts {
            if added == ROWS_PER_ROUND || converged(value, bound) {
                break;
            }
            if !seen.insert((k, in_s.clone())) {
                continue;
            }
            let mut coeffs = cut_coeffs(instance, &omega[k], &in_s, 0);
            for c in &mut coeffs {
                c.1 = -1.0;
            }
            coeffs.push((z, 1.0));
            lp.add_row(coeffs, Relation::Le, 0.0);
            row_owner.push(k);
            added += 1;
        }
        if added == 0 {
            return Err(Error::NumericalFailure(format!(
                "cut generation stalled at z = {bound}, worst scenario {worst}"
            )));
        }
    }
    Err(Error::NumericalFailure("cut generation did not converge".into()))
}

/// Z_RNI from the scenario-expanded LP with one inner flow `y^μ` per
/// scenario. Exact but large; intended for small instances.
pub fn solve_rni_expanded(instance: &Instance, limits: &Limits) -> Result<RniSolution> {
    check_scenario_limit(instance, limits.lp_scenario)?;
    let omega: Vec<Scenario> = scenarios(instance, limits.lp_scenario)?.collect();
    let m = instance.arc_count();
    let caps = instance.capacities();
    let nominal = graph::nominal_max_flow(instance);

    let mut lp = LpProblem::new(Sense::Maximize, 0);
    for &u in caps {
        lp.add_var(0.0, 0.0, u);
    }
    let z = lp.add_var(1.0, f64::NEG_INFINITY, nominal + 1.0);
    add_conservation(&mut lp, instance, 0);
    let mut value_rows = Vec::with_capacity(omega.len());
    let mut offsets = Vec::with_capacity(omega.len());
    for mu in &omega {
        let offset = lp.num_vars();
        offsets.push(offset);
        for (i, &u) in caps.iter().enumerate() {
            let upper = if mu.removes(ArcId(i)) { 0.0 } else { u };
            lp.add_var(0.0, 0.0, upper);
        }
        add_conservation(&mut lp, instance, offset);
        for i in 0..m {
            if !mu.removes(ArcId(i)) {
                lp.add_row(vec![(offset + i, 1.0), (i, -1.0)], Relation::Le, 0.0);
            }
        }
        let mut coeffs: Vec<(usize, f64)> = instance
            .out_arcs(instance.source())
            .map(|e| (offset + e.0, -1.0))
            .collect();
        coeffs.push((z, 1.0));
        value_rows.push(lp.add_row(coeffs, Relation::Le, 0.0));
    }
    let sol = require_optimal(solve_lp(&lp)?, "scenario-expanded")?;
    let weights = omega
        .iter()
        .zip(&value_rows)
        .map(|(mu, &r)| (mu.clone(), sol.duals[r]))
        .collect();
    let strategy = strategy_from_weights(weights)?;
    let scenario_flows = omega
        .iter()
        .zip(&offsets)
        .filter(|(mu, _)| strategy.probability(mu) > 0.0)
        .map(|(mu, &o)| (mu.clone(), clean_arc_flow(instance, &sol.primal[o..o + m])))
        .collect();
    Ok(RniSolution {
        value: sol.primal[z],
        strategy,
        witness: Witness::Arc(clean_arc_flow(instance, &sol.primal[..m])),
        scenario_flows,
    })
}

/// Per-arc capacity rows `Σ_{P∋e} x_P ≤ u_e` for arcs used by some path.
fn add_path_capacity_rows(lp: &mut LpProblem, instance: &Instance, paths: &[Path]) {
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); instance.arc_count()];
    for (p, path) in paths.iter().enumerate() {
        for e in path {
            users[e.0].push(p);
        }
    }
    for (i, list) in users.iter().enumerate() {
        if !list.is_empty() {
            let coeffs = list.iter().map(|&p| (p, 1.0)).collect();
            lp.add_row(coeffs, Relation::Le, instance.capacities()[i]);
        }
    }
}

fn path_flow_from(paths: &[Path], amounts: &[f64]) -> PathFlow {
    PathFlow::new(
        paths
            .iter()
            .zip(amounts)
            .filter(|(_, &a)| a > 1e-11)
            .map(|(p, &a)| (p.clone(), a))
            .collect(),
    )
}

/// Z_RNI^Path with an optimal mixed interdiction.
///
/// Variables are path amounts `x_P`. Scenario rows `z ≤ Σ_{P∩E(μ)=∅} x_P`
/// are added lazily for the most violated scenarios.
pub fn solve_rni_path(instance: &Instance, limits: &Limits) -> Result<RniSolution> {
    check_scenario_limit(instance, limits.lp_scenario)?;
    let paths = graph::enumerate_paths(instance, limits.path)?;
    let omega: Vec<Scenario> = scenarios(instance, limits.lp_scenario)?.collect();
    let survives: Vec<Vec<bool>> = omega
        .iter()
        .map(|mu| paths.iter().map(|p| !p.iter().any(|e| mu.removes(*e))).collect())
        .collect();
    let np = paths.len();
    let nominal = graph::nominal_max_flow(instance);

    let mut lp = LpProblem::new(Sense::Maximize, np);
    let z = lp.add_var(1.0, f64::NEG_INFINITY, nominal + 1.0);
    add_path_capacity_rows(&mut lp, instance, &paths);
    let base_rows = lp.rows().len();
    let mut row_owner: Vec<usize> = Vec::new();
    let mut present = vec![false; omega.len()];

    for _ in 0..MAX_ROUNDS {
        let sol = require_optimal(solve_lp(&lp)?, "path interdiction")?;
        let bound = sol.primal[z];
        let x = &sol.primal[..np];
        let mut values: Vec<(usize, f64)> = survives
            .iter()
            .enumerate()
            .map(|(k, alive)| (k, alive.iter().zip(x).filter(|(a, _)| **a).map(|(_, v)| v).sum()))
            .collect();
        let worst = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        if converged(worst, bound) {
            let mut weights = vec![0.0; omega.len()];
            for (r, &k) in row_owner.iter().enumerate() {
                weights[k] += sol.duals[base_rows + r];
            }
            let strategy =
                strategy_from_weights(omega.iter().cloned().zip(weights).collect())?;
            return Ok(RniSolution {
                value: bound,
                strategy,
                witness: Witness::Path(path_flow_from(&paths, x)),
                scenario_flows: Vec::new(),
            });
        }
        values.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut added = 0;
        for (k, value) in values {
            if added == ROWS_PER_ROUND || converged(value, bound) {
                break;
            }
            if present[k] {
                continue;
            }
            present[k] = true;
            let mut coeffs: Vec<(usize, f64)> = survives[k]
                .iter()
                .enumerate()
                .filter(|(_, a)| **a)
                .map(|(p, _)| (p, -1.0))
                .collect();
            coeffs.push((z, 1.0));
            lp.add_row(coeffs, Relation::Le, 0.0);
            row_owner.push(k);
            added += 1;
        }
        if added == 0 {
            return Err(Error::NumericalFailure(format!(
                "scenario generation stalled at z = {bound}, worst scenario {worst}"
            )));
        }
    }
    Err(Error::NumericalFailure("scenario generation did not converge".into()))
}

/// The Γ=1 cut LP: minimize `Σ u_e ρ_e` subject to
/// `ρ_e + α_e + π_v − π_w ≥ 0` per arc `e = (v,w)`, `π_t − π_s ≥ 1`,
/// `Σ α_e = 1` and `α, ρ ≥ 0`.
pub fn solve_rni_gamma1(instance: &Instance) -> Result<Gamma1Solution> {
    if instance.gamma() != 1 {
        return Err(Error::GammaMismatch {
            gamma: instance.gamma(),
        });
    }
    let m = instance.arc_count();
    let n = instance.node_count();
    let (s, t) = (instance.source(), instance.sink());
    let mut lp = LpProblem::new(Sense::Minimize, 0);
    let rho: Vec<usize> = instance.capacities().iter().map(|&u| lp.add_var(u, 0.0, f64::INFINITY)).collect();
    let alpha: Vec<usize> = (0..m).map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
    let pi: Vec<usize> = (0..n)
        .map(|v| {
            if v == s {
                lp.add_var(0.0, 0.0, 0.0)
            } else {
                lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY)
            }
        })
        .collect();
    let arc_rows: Vec<usize> = instance
        .arcs()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            lp.add_row(
                vec![(rho[i], 1.0), (alpha[i], 1.0), (pi[a.tail], 1.0), (pi[a.head], -1.0)],
                Relation::Ge,
                0.0,
            )
        })
        .collect();
    lp.add_row(vec![(pi[t], 1.0), (pi[s], -1.0)], Relation::Ge, 1.0);
    lp.add_row(alpha.iter().map(|&j| (j, 1.0)).collect(), Relation::Eq, 1.0);
    let sol = require_optimal(solve_lp(&lp)?, "single-arc cut")?;
    let pick = |ids: &[usize]| -> Vec<f64> { ids.iter().map(|&j| sol.primal[j]).collect() };
    let flow_raw: Vec<f64> = arc_rows.iter().map(|&r| sol.duals[r]).collect();
    let solution = Gamma1Solution {
        value: sol.objective,
        alpha: pick(&alpha),
        rho: pick(&rho),
        pi: pick(&pi),
        flow: clean_arc_flow(instance, &flow_raw),
    };
    solution.check(instance)?;
    Ok(solution)
}

/// `max_{x∈X} Σ_μ α(μ) f(μ,x)` with a maximizing arc flow.
///
/// Variables are `x` and one `w_μ` per support scenario; rows
/// `w_μ ≤ Σ_{e∈δ⁺(S)\E(μ)} x_e` are generated from minimal min cuts.
pub fn best_response_arc(
    instance: &Instance,
    alpha: &MixedStrategy,
    limits: &Limits,
) -> Result<(f64, ArcFlow)> {
    alpha.validate_for(instance)?;
    let support = alpha.support();
    if support.len() > limits.lp_scenario {
        return Err(Error::ScenarioLimitExceeded {
            count: support.len() as u128,
            limit: limits.lp_scenario,
        });
    }
    let m = instance.arc_count();
    let nominal = graph::nominal_max_flow(instance);
    let mut lp = LpProblem::new(Sense::Maximize, 0);
    for &u in instance.capacities() {
        lp.add_var(0.0, 0.0, u);
    }
    let w: Vec<usize> = support.iter().map(|(_, p)| lp.add_var(*p, 0.0, nominal)).collect();
    add_conservation(&mut lp, instance, 0);
    let mut seen: HashSet<(usize, Vec<bool>)> = HashSet::new();

    for _ in 0..MAX_ROUNDS {
        let sol = require_optimal(solve_lp(&lp)?, "arc best response")?;
        let x = &sol.primal[..m];
        let mut added = 0;
        let mut achieved = 0.0;
        for (k, (mu, p)) in support.iter().enumerate() {
            let (value, _, in_s) = graph::max_flow_with_cut(instance, &mu.surviving(x));
            achieved += p * value;
            let claimed = sol.primal[w[k]];
            if !converged(value, claimed) && seen.insert((k, in_s.clone())) {
                let mut coeffs: Vec<(usize, f64)> = cut_coeffs(instance, mu, &in_s, 0)
                    .into_iter()
                    .map(|(j, _)| (j, -1.0))
                    .collect();
                coeffs.push((w[k], 1.0));
                lp.add_row(coeffs, Relation::Le, 0.0);
                added += 1;
            }
        }
        if added == 0 {
            if !converged(achieved, sol.objective) {
                return Err(Error::NumericalFailure(format!(
                    "best response stalled at {} with {achieved} achieved",
                    sol.objective
                )));
            }
            return Ok((sol.objective, clean_arc_flow(instance, x)));
        }
    }
    Err(Error::NumericalFailure("arc best response did not converge".into()))
}

/// `max_x Σ_μ α(μ) g(μ,x)`: maximize `Σ_P w_P x_P` with survival weights
/// `w_P = Σ_{μ: P∩E(μ)=∅} α(μ)` under arc capacities.
pub fn best_response_path(
    instance: &Instance,
    alpha: &MixedStrategy,
    limits: &Limits,
) -> Result<(f64, PathFlow)> {
    alpha.validate_for(instance)?;
    let paths = graph::enumerate_paths(instance, limits.path)?;
    let mut lp = LpProblem::new(Sense::Maximize, paths.len());
    for (j, path) in paths.iter().enumerate() {
        let weight: f64 = alpha
            .support()
            .iter()
            .filter(|(mu, _)| !path.iter().any(|e| mu.removes(*e)))
            .map(|(_, p)| p)
            .sum();
        lp.set_objective(j, weight);
    }
    add_path_capacity_rows(&mut lp, instance, &paths);
    let sol = require_optimal(solve_lp(&lp)?, "path best response")?;
    Ok((sol.objective, path_flow_from(&paths, &sol.primal)))
}

/// Saddle-point check of a solver output. The model follows the witness.
pub fn certify(instance: &Instance, solution: &RniSolution, limits: &Limits) -> Result<CertificateReport> {
    certify_with_tolerance(instance, solution, limits, CERTIFICATE_TOLERANCE)
}

/// [`certify`] with PASS iff both gaps are within `tolerance·(1+value)`.
pub fn certify_with_tolerance(
    instance: &Instance,
    solution: &RniSolution,
    limits: &Limits,
    tolerance: f64,
) -> Result<CertificateReport> {
    let model = solution.witness.model();
    let worst = match &solution.witness {
        Witness::Arc(x) => game::adaptive_value(instance, x, limits.scenario)?,
        Witness::Path(p) => game::adaptive_value_path(instance, p, limits.scenario)?,
    };
    let response = match model {
        FlowModel::Arc => best_response_arc(instance, &solution.strategy, limits)?.0,
        FlowModel::Path => best_response_path(instance, &solution.strategy, limits)?.0,
    };
    let flow_gap = solution.value - worst.value;
    let adversary_gap = response - solution.value;
    let slack = tolerance * (1.0 + solution.value.abs());
    Ok(CertificateReport {
        model,
        flow_gap,
        adversary_gap,
        pass: flow_gap.abs() <= slack && adversary_gap.abs() <= slack,
    })
}
