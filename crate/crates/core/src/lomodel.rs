//! The uniform-cap relaxation `Z_LO(θ) = max Val(x) − Γθ` subject to
//! `x ∈ X` and `x_e ≤ θ`, its optimal cuts and the approximation report.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, ArcFlow, CutReport, Instance};
use crate::linopt::{solve_lp_lexicographic, LpProblem, Relation, Sense};
use crate::solvers::{self, Limits};

const CUT_TOLERANCE: f64 = 1e-6;
const PREMISE_MARGIN: f64 = 1e-9;
const COMPARISON_TOLERANCE: f64 = 1e-6;
const EPSILON_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoSolution {
    pub value: f64,
    pub theta_star: f64,
    pub flow: ArcFlow,
    pub flow_value: f64,
}

/// `Z_LO(θ) = maxflow(u(θ)) − Γθ`.
pub fn lo_value_at(instance: &Instance, theta: f64) -> f64 {
    let caps = graph::clipped_capacities(instance.capacities(), theta);
    graph::max_flow(instance, &caps).0 - instance.gamma() as f64 * theta
}

/// Optimal `(x*, θ*)` with the largest θ* among optima.
pub fn solve_lo(instance: &Instance) -> Result<LoSolution> {
    let m = instance.arc_count();
    let gamma = instance.gamma() as f64;
    let mut lp = LpProblem::new(Sense::Maximize, 0);
    for &u in instance.capacities() {
        lp.add_var(0.0, 0.0, u);
    }
    for e in instance.out_arcs(instance.source()) {
        lp.set_objective(e.0, 1.0);
    }
    let theta = lp.add_var(-gamma, 0.0, instance.big_m());
    for v in 0..instance.node_count() {
        if v == instance.source() || v == instance.sink() {
            continue;
        }
        let coeffs: Vec<(usize, f64)> = instance
            .arcs()
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match (a.head == v, a.tail == v) {
                (true, _) => Some((i, 1.0)),
                (_, true) => Some((i, -1.0)),
                _ => None,
            })
            .collect();
        if !coeffs.is_empty() {
            lp.add_row(coeffs, Relation::Eq, 0.0);
        }
    }
    for i in 0..m {
        lp.add_row(vec![(i, 1.0), (theta, -1.0)], Relation::Le, 0.0);
    }
    let mut secondary = vec![0.0; m + 1];
    secondary[theta] = 1.0;
    let sol = solve_lp_lexicographic(&lp, Sense::Maximize, &secondary)?;
    if !sol.is_optimal() {
        return Err(Error::NumericalFailure(format!("LO model ended {:?}", sol.status)));
    }
    let theta_star = polish_theta(instance, sol.primal[theta].max(0.0), sol.objective);
    let caps = graph::clipped_capacities(instance.capacities(), theta_star);
    let (flow_value, flow) = graph::max_flow(instance, &caps);
    let value = flow_value - gamma * theta_star;
    if (value - sol.objective).abs() > CUT_TOLERANCE * (1.0 + value.abs()) {
        return Err(Error::NumericalFailure(format!(
            "LO objective {} disagrees with max flow at θ* ({value})",
            sol.objective
        )));
    }
    Ok(LoSolution {
        value,
        theta_star,
        flow,
        flow_value,
    })
}

/// `(Σ_{u_e ≤ θ} u_e, #{u_e > θ})` over the arcs crossing the minimal min
/// cut for `u(θ)`, so that the cut's capacity near θ is `c + kθ`.
fn cut_line(instance: &Instance, theta: f64) -> (f64, usize) {
    let report = cut_at(instance, theta, theta);
    let caps = instance.capacities();
    report.crossing.iter().fold((0.0, 0), |(c, k), e| {
        let u = caps[e.0];
        if u <= theta {
            (c + u, k)
        } else {
            (c, k + 1)
        }
    })
}

/// Snaps an LP θ onto the breakpoint of `Z_LO(θ)` it approximates.
fn polish_theta(instance: &Instance, theta: f64, objective: f64) -> f64 {
    let delta = 1e-7 * (1.0 + theta);
    let (c1, k1) = cut_line(instance, (theta - delta).max(0.0));
    let (c2, k2) = cut_line(instance, theta + delta);
    if theta == 0.0 {
        return theta;
    }
    if k1 <= k2 {
        // No slope change nearby, so the optimum sits on the boundary θ = 0.
        return if theta <= delta { 0.0 } else { theta };
    }
    let exact = ((c2 - c1) / (k1 - k2) as f64).max(0.0);
    let keeps_optimum = lo_value_at(instance, exact) >= objective - 1e-9 * (1.0 + objective.abs());
    if (exact - theta).abs() <= 1e-6 * (1.0 + theta) && keeps_optimum {
        exact
    } else {
        theta
    }
}

/// The two cuts around θ*: `S′` is minimal for `u(θ*−ε)`, `S″` for
/// `u(θ*+ε)`. Both are evaluated at θ*.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoCuts {
    pub s_prime: CutReport,
    pub s_double_prime: CutReport,
    pub epsilon: f64,
}

impl LoCuts {
    /// `|A(S′,θ*)|`.
    pub fn a(&self) -> usize {
        self.s_prime.tight_at_or_below.len()
    }

    /// `|B(S″,θ*)|`.
    pub fn b(&self) -> usize {
        self.s_double_prime.strictly_below.len()
    }

    /// `Σ u_e` over the arcs of `δ⁺(S′)` outside `A(S′,θ*)`.
    pub fn l(&self, instance: &Instance) -> f64 {
        let caps = instance.capacities();
        self.s_prime
            .crossing
            .iter()
            .filter(|e| !self.s_prime.tight_at_or_below.contains(e))
            .map(|e| caps[e.0])
            .sum()
    }
}

fn initial_epsilon(instance: &Instance, theta_star: f64) -> f64 {
    let mut points: Vec<f64> = instance.capacities().to_vec();
    points.push(theta_star);
    points.sort_by(f64::total_cmp);
    let gap = points
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let gap = if gap.is_finite() { gap } else { 1.0 + theta_star };
    gap / (2.0 * instance.arc_count() as f64)
}

fn cut_at(instance: &Instance, probe: f64, theta_star: f64) -> CutReport {
    let caps = instance.capacities();
    let (_, _, in_s) = graph::max_flow_with_cut(instance, &graph::clipped_capacities(caps, probe));
    CutReport::evaluate(instance, caps, &in_s, Some(theta_star))
}

/// Cuts `S′` and `S″` with `|A(S′,θ*)| ≥ Γ`, `|B(S″,θ*)| < Γ` and
/// `Cap(·,θ*) = Val(x*)`. The probe ε is halved until every condition
/// holds. When θ* = 0 the first condition is not checked and `S′` is the
/// minimal cut at θ* itself.
pub fn lo_cuts(instance: &Instance, solution: &LoSolution) -> Result<LoCuts> {
    let theta = solution.theta_star;
    let gamma = instance.gamma();
    let val = solution.flow_value;
    let tol = CUT_TOLERANCE * (1.0 + val.abs());
    let mut epsilon = initial_epsilon(instance, theta);
    let mut failure = String::new();
    for _ in 0..EPSILON_HALVINGS {
        let s_prime = if theta > 0.0 {
            cut_at(instance, (theta - epsilon).max(0.0), theta)
        } else {
            cut_at(instance, 0.0, theta)
        };
        let s_double_prime = cut_at(instance, theta + epsilon, theta);
        let cuts = LoCuts {
            s_prime,
            s_double_prime,
            epsilon,
        };
        let checks = [
            (theta == 0.0 || cuts.a() >= gamma, "|A(S′,θ*)| < Γ"),
            (cuts.b() < gamma, "|B(S″,θ*)| ≥ Γ"),
            ((cuts.s_prime.capacity_at_theta - val).abs() <= tol, "Cap(S′,θ*) ≠ Val(x*)"),
            ((cuts.s_double_prime.capacity_at_theta - val).abs() <= tol, "Cap(S″,θ*) ≠ Val(x*)"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            None => return Ok(cuts),
            Some((_, msg)) => failure = format!("{msg} at θ* = {theta}, ε = {epsilon}"),
        }
        epsilon /= 2.0;
    }
    Err(Error::InvariantViolation(failure))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum ValueSource {
    Computed,
    /// Inferred from a relation that holds for this instance.
    Derived(String),
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportValue {
    pub value: Option<f64>,
    pub source: ValueSource,
}

impl ReportValue {
    fn computed(v: f64) -> Self {
        ReportValue {
            value: Some(v),
            source: ValueSource::Computed,
        }
    }

    fn derived(v: f64, why: &str) -> Self {
        ReportValue {
            value: Some(v),
            source: ValueSource::Derived(why.into()),
        }
    }

    fn unavailable(why: String) -> Self {
        ReportValue {
            value: None,
            source: ValueSource::Unavailable(why),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "PASS(tight)")]
    PassTight,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "N-A")]
    NotApplicable,
}

impl Verdict {
    pub fn is_failure(self) -> bool {
        self == Verdict::Fail
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::PassTight => "PASS(tight)",
            Verdict::Fail => "FAIL",
            Verdict::NotApplicable => "N-A",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `lhs ≤ rhs` between two values.
    Order,
    /// `lhs = num/den ≤ rhs`.
    Ratio,
    /// `lhs = rhs` whenever a premise holds.
    Conditional,
    /// Cut cardinality condition.
    Cut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bound {
    pub name: String,
    pub kind: BoundKind,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub gamma: usize,
    pub nominal: f64,
    pub z_ni: ReportValue,
    pub z_rni: ReportValue,
    pub z_rni_path: ReportValue,
    pub z_lo: f64,
    pub theta_star: f64,
    pub flow_value: f64,
    pub x_star_is_max_flow: bool,
    pub cuts: LoCuts,
    pub a: usize,
    pub b: usize,
    pub l: f64,
    pub bounds: Vec<Bound>,
    /// Some value was derived or could not be obtained within limits.
    pub partial: bool,
}

impl ApproxReport {
    pub fn bound(&self, name: &str) -> Option<&Bound> {
        self.bounds.iter().find(|b| b.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Bound> {
        self.bounds.iter().filter(|b| b.verdict.is_failure())
    }
}

/// `1 + ⌊Γ/2⌋·⌈Γ/2⌉/(Γ+1)`.
pub fn path_over_lo_bound(gamma: usize) -> f64 {
    let lo = (gamma / 2) as f64;
    let hi = gamma.div_ceil(2) as f64;
    1.0 + lo * hi / (gamma as f64 + 1.0)
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= COMPARISON_TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

fn order_bound(name: &str, lhs: Option<f64>, rhs: Option<f64>) -> Bound {
    let verdict = match (lhs, rhs) {
        (Some(l), Some(r)) if l <= r + COMPARISON_TOLERANCE * (1.0 + r.abs()) => Verdict::Pass,
        (Some(_), Some(_)) => Verdict::Fail,
        _ => Verdict::NotApplicable,
    };
    Bound {
        name: name.into(),
        kind: BoundKind::Order,
        lhs,
        rhs,
        verdict,
    }
}

fn ratio_bound(name: &str, num: Option<f64>, den: Option<f64>, limit: f64) -> Bound {
    let (lhs, verdict) = match (num, den) {
        (Some(n), Some(d)) if d.abs() <= PREMISE_MARGIN => {
            let verdict = if n.abs() <= COMPARISON_TOLERANCE {
                Verdict::NotApplicable
            } else {
                Verdict::Fail
            };
            (None, verdict)
        }
        (Some(n), Some(d)) => {
            let ratio = n / d;
            let verdict = if n > limit * d + COMPARISON_TOLERANCE * (1.0 + n.abs()) {
                Verdict::Fail
            } else if (ratio - limit).abs() <= COMPARISON_TOLERANCE * limit {
                Verdict::PassTight
            } else {
                Verdict::Pass
            };
            (Some(ratio), verdict)
        }
        _ => (None, Verdict::NotApplicable),
    };
    Bound {
        name: name.into(),
        kind: BoundKind::Ratio,
        lhs,
        rhs: Some(limit),
        verdict,
    }
}

/// Equality `lhs = rhs` required when `premise` holds.
fn conditional(name: &str, premise: bool, lhs: Option<f64>, rhs: f64) -> Bound {
    let verdict = match (premise, lhs) {
        (true, Some(l)) if near(l, rhs) => Verdict::Pass,
        (true, Some(_)) => Verdict::Fail,
        _ => Verdict::NotApplicable,
    };
    Bound {
        name: name.into(),
        kind: BoundKind::Conditional,
        lhs,
        rhs: Some(rhs),
        verdict,
    }
}

fn cut_bound(name: &str, holds: Option<bool>, lhs: usize, gamma: usize) -> Bound {
    let verdict = match holds {
        Some(true) => Verdict::Pass,
        Some(false) => Verdict::Fail,
        None => Verdict::NotApplicable,
    };
    Bound {
        name: name.into(),
        kind: BoundKind::Cut,
        lhs: Some(lhs as f64),
        rhs: Some(gamma as f64),
        verdict,
    }
}

fn attempt<T>(result: Result<T>) -> Result<std::result::Result<T, String>> {
    match result {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_resource_limit() => Ok(Err(e.to_string())),
        Err(e) => Err(e),
    }
}

/// All values, cuts and bound checks for one instance.
///
/// Values beyond the limits are inferred where an exact relation applies:
/// `Z_NI = Z_LO` when `Z_LO < Val(x*)/(Γ+1)`, `Z_RNI = Z_LO` when
/// `Z_LO < θ*` or `x*` is a maximum flow, and equalities squeezed between
/// known values along `Z_LO ≤ Z_RNI^Path ≤ Z_RNI ≤ Z_NI`.
pub fn approx_report(instance: &Instance, limits: &Limits) -> Result<ApproxReport> {
    let gamma = instance.gamma();
    let g = gamma as f64;
    let nominal = graph::nominal_max_flow(instance);
    let lo = solve_lo(instance)?;
    let cuts = lo_cuts(instance, &lo)?;
    let z_lo = lo.value;
    let val = lo.flow_value;
    let theta = lo.theta_star;
    let x_star_is_max_flow = near(val, nominal);
    let margin = PREMISE_MARGIN * (1.0 + val.abs());
    let premise_ni = z_lo < val / (g + 1.0) - margin;
    let premise_theta = z_lo < theta - margin;

    let z_ni = match attempt(solvers::solve_ni(instance, limits))? {
        Ok(s) => ReportValue::computed(s.value),
        Err(_) if premise_ni => ReportValue::derived(z_lo, "Z_LO < Val(x*)/(Γ+1)"),
        Err(why) => ReportValue::unavailable(why),
    };
    let z_rni = match attempt(solvers::solve_rni(instance, limits))? {
        Ok(s) => ReportValue::computed(s.value),
        Err(_) if premise_theta => ReportValue::derived(z_lo, "Z_LO < θ*"),
        Err(_) if x_star_is_max_flow => ReportValue::derived(z_lo, "x* is a maximum flow"),
        Err(_) if z_ni.value.is_some_and(|v| near(v, z_lo)) => {
            ReportValue::derived(z_lo, "Z_LO = Z_NI")
        }
        Err(why) => ReportValue::unavailable(why),
    };
    let z_rni_path = match attempt(solvers::solve_rni_path(instance, limits))? {
        Ok(s) => ReportValue::computed(s.value),
        Err(_) if z_rni.value.is_some_and(|v| near(v, z_lo)) => {
            ReportValue::derived(z_lo, "Z_LO = Z_RNI")
        }
        Err(why) => ReportValue::unavailable(why),
    };
    let partial = [&z_ni, &z_rni, &z_rni_path]
        .iter()
        .any(|v| v.source != ValueSource::Computed);

    let (ni, rni, path) = (z_ni.value, z_rni.value, z_rni_path.value);
    let lo_v = Some(z_lo);
    let mut bounds = vec![
        order_bound("Z_LO ≤ Z_RNI^Path", lo_v, path),
        order_bound("Z_RNI^Path ≤ Z_RNI", path, rni),
        order_bound("Z_RNI ≤ Z_NI", rni, ni),
        ratio_bound("Z_NI/Z_RNI", ni, rni, g + 1.0),
        ratio_bound("Z_NI/Z_RNI^Path", ni, path, g + 1.0),
        ratio_bound("Z_RNI/Z_RNI^Path", rni, path, g),
        ratio_bound("Z_NI/Z_LO", ni, lo_v, g + 1.0),
        ratio_bound("Z_RNI/Z_LO", rni, lo_v, g),
        ratio_bound("Z_RNI^Path/Z_LO", path, lo_v, path_over_lo_bound(gamma)),
        cut_bound(
            "|A(S′,θ*)| ≥ Γ",
            (theta > 0.0).then(|| cuts.a() >= gamma),
            cuts.a(),
            gamma,
        ),
        cut_bound("|B(S″,θ*)| < Γ", Some(cuts.b() < gamma), cuts.b(), gamma),
        conditional("Z_LO < Val(x*)/(Γ+1) ⇒ Z_NI = Z_LO", premise_ni, ni, z_lo),
        conditional("Z_LO < θ* ⇒ Z_RNI = Z_LO", premise_theta, rni, z_lo),
        order_bound("Z_NI ≤ Val(x*)", ni, Some(val)),
        conditional("x* maximum ⇒ Z_RNI = Z_LO", x_star_is_max_flow, rni, z_lo),
        order_bound("Z_RNI ≤ Val(x*) − θ*", rni, Some(val - theta)),
    ];
    // A derived value cannot confirm the relation it was derived from.
    for b in &mut bounds {
        if b.kind == BoundKind::Conditional && b.verdict == Verdict::Pass {
            let source = if b.name.contains("Z_NI =") { &z_ni.source } else { &z_rni.source };
            if source != &ValueSource::Computed {
                b.verdict = Verdict::NotApplicable;
            }
        }
    }

    Ok(ApproxReport {
        gamma,
        nominal,
        z_ni,
        z_rni,
        z_rni_path,
        z_lo,
        theta_star: theta,
        flow_value: val,
        x_star_is_max_flow,
        a: cuts.a(),
        b: cuts.b(),
        l: cuts.l(instance),
        cuts,
        bounds,
        partial,
    })
}
