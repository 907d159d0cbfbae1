//! Scenarios, mixed interdiction strategies and the two payoff functions.
//!
//! The arc payoff `f(μ,x)` is the max flow that can be rerouted inside the
//! committed arc flow `x` after the arcs of `μ` are removed. The path payoff
//! `g(μ,x)` is the committed path flow whose paths avoid every removed arc.

use std::fmt;

use itertools::Itertools;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{self, ArcFlow, ArcId, FlowRef, Instance, PathFlow};

pub const DEFAULT_SCENARIO_LIMIT: usize = 20_000;

/// Probabilities must sum to one within this tolerance.
pub const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// A set of exactly Γ removed arcs, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Scenario {
    removed: Vec<ArcId>,
}

impl Scenario {
    /// Builds a scenario from arc ids in any order. Duplicates are rejected.
    pub fn new(mut removed: Vec<ArcId>) -> Result<Self> {
        removed.sort_unstable();
        if removed.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidStrategy("scenario repeats an arc".into()));
        }
        Ok(Scenario { removed })
    }

    /// Builds a scenario and checks it against the instance's arcs and Γ.
    pub fn for_instance(instance: &Instance, removed: Vec<ArcId>) -> Result<Self> {
        let s = Scenario::new(removed)?;
        s.check(instance)?;
        Ok(s)
    }

    fn check(&self, instance: &Instance) -> Result<()> {
        if self.removed.len() != instance.gamma() {
            return Err(Error::InvalidStrategy(format!(
                "scenario {self} removes {} arcs, Γ = {}",
                self.removed.len(),
                instance.gamma()
            )));
        }
        if self.removed.iter().any(|e| e.0 >= instance.arc_count()) {
            return Err(Error::InvalidStrategy(format!("scenario {self} names an unknown arc")));
        }
        Ok(())
    }

    pub fn removed(&self) -> &[ArcId] {
        &self.removed
    }

    pub fn removes(&self, e: ArcId) -> bool {
        self.removed.binary_search(&e).is_ok()
    }

    /// Copies `caps` with the removed arcs zeroed.
    pub fn surviving(&self, caps: &[f64]) -> Vec<f64> {
        let mut out = caps.to_vec();
        for e in &self.removed {
            out[e.0] = 0.0;
        }
        out
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.removed.iter().map(|e| e.number()).join(","))
    }
}

/// Probability distribution over distinct scenarios with finite support.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy {
    support: Vec<(Scenario, f64)>,
}

impl MixedStrategy {
    pub fn new(support: Vec<(Scenario, f64)>) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidStrategy("empty support".into()));
        }
        let mut total = 0.0;
        for (s, p) in &support {
            if !(*p >= 0.0 && *p <= 1.0 + PROBABILITY_TOLERANCE) {
                return Err(Error::InvalidStrategy(format!("probability {p} for {s}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {total}")));
        }
        let distinct = support.iter().map(|(s, _)| s).all_unique();
        if !distinct {
            return Err(Error::InvalidStrategy("repeated scenario in support".into()));
        }
        Ok(MixedStrategy { support })
    }

    pub fn pure(scenario: Scenario) -> Self {
        MixedStrategy {
            support: vec![(scenario, 1.0)],
        }
    }

    pub fn uniform(scenarios: Vec<Scenario>) -> Result<Self> {
        let p = 1.0 / scenarios.len() as f64;
        MixedStrategy::new(scenarios.into_iter().map(|s| (s, p)).collect())
    }

    pub fn support(&self) -> &[(Scenario, f64)] {
        &self.support
    }

    pub fn probability(&self, scenario: &Scenario) -> f64 {
        self.support
            .iter()
            .find(|(s, _)| s == scenario)
            .map_or(0.0, |(_, p)| *p)
    }

    /// Checks every support scenario against the instance.
    pub fn validate_for(&self, instance: &Instance) -> Result<()> {
        self.support.iter().try_for_each(|(s, _)| s.check(instance))
    }

    /// The mixture `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &MixedStrategy, lambda: f64) -> Result<Self> {
        let mut merged: Vec<(Scenario, f64)> = Vec::new();
        for (s, p) in &self.support {
            merged.push((s.clone(), lambda * p));
        }
        for (s, p) in &other.support {
            match merged.iter_mut().find(|(t, _)| t == s) {
                Some((_, q)) => *q += (1.0 - lambda) * p,
                None => merged.push((s.clone(), (1.0 - lambda) * p)),
            }
        }
        MixedStrategy::new(merged)
    }
}

/// `C(m, Γ)`, saturating.
pub fn scenario_count(instance: &Instance) -> u128 {
    binomial(instance.arc_count(), instance.gamma())
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

pub(crate) fn check_scenario_limit(instance: &Instance, limit: usize) -> Result<()> {
    let count = scenario_count(instance);
    if count > limit as u128 {
        return Err(Error::ScenarioLimitExceeded { count, limit });
    }
    Ok(())
}

/// Ω in lexicographic order of sorted arc-id tuples.
pub fn scenarios(instance: &Instance, limit: usize) -> Result<impl Iterator<Item = Scenario>> {
    check_scenario_limit(instance, limit)?;
    Ok((0..instance.arc_count())
        .combinations(instance.gamma())
        .map(|ids| Scenario {
            removed: ids.into_iter().map(ArcId).collect(),
        }))
}

/// `f(μ,x)`: max flow with capacities `x_e` on surviving arcs.
pub fn payoff_arc(instance: &Instance, scenario: &Scenario, x: &ArcFlow) -> f64 {
    let caps = scenario.surviving(&x.values);
    graph::max_flow(instance, &caps).0
}

/// `g(μ,x)`: flow on paths that avoid every removed arc.
pub fn payoff_path(scenario: &Scenario, x: &PathFlow) -> f64 {
    x.entries
        .iter()
        .filter(|(path, _)| !path.iter().any(|e| scenario.removes(*e)))
        .map(|(_, amount)| amount)
        .sum()
}

pub fn payoff(instance: &Instance, scenario: &Scenario, x: FlowRef<'_>) -> f64 {
    match x {
        FlowRef::Arc(f) => payoff_arc(instance, scenario, f),
        FlowRef::Path(p) => payoff_path(scenario, p),
    }
}

/// Worst-case payoff over Ω with the first minimizing scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveValue {
    pub value: f64,
    pub witness: Scenario,
}

fn worst_case(
    instance: &Instance,
    x: FlowRef<'_>,
    limit: usize,
) -> Result<AdaptiveValue> {
    let mut best: Option<AdaptiveValue> = None;
    for scenario in scenarios(instance, limit)? {
        let value = payoff(instance, &scenario, x);
        let improves = match &best {
            None => true,
            Some(b) => value < b.value - 1e-12 * (1.0 + b.value.abs()),
        };
        if improves {
            best = Some(AdaptiveValue {
                value,
                witness: scenario,
            });
        }
    }
    Ok(best.expect("Ω is nonempty since 1 ≤ Γ ≤ |E|"))
}

/// `AVal(x) = min_μ f(μ,x)` by full scenario enumeration.
pub fn adaptive_value(instance: &Instance, x: &ArcFlow, limit: usize) -> Result<AdaptiveValue> {
    worst_case(instance, FlowRef::Arc(x), limit)
}

/// `min_μ g(μ,x)` for a path flow.
pub fn adaptive_value_path(instance: &Instance, x: &PathFlow, limit: usize) -> Result<AdaptiveValue> {
    worst_case(instance, FlowRef::Path(x), limit)
}

/// `min_S R(x,S)`, where `R(x,S)` is the flow crossing `S` minus its Γ
/// largest arc values. Enumerates all s-t cuts.
pub fn adaptive_value_by_cuts(instance: &Instance, x: &ArcFlow) -> Result<f64> {
    let cuts = graph::enumerate_cuts(instance)?;
    let gamma = instance.gamma();
    let value = cuts
        .iter()
        .map(|in_s| {
            let mut crossing: Vec<f64> = instance
                .arcs()
                .iter()
                .zip(&x.values)
                .filter(|(a, _)| in_s[a.tail] && !in_s[a.head])
                .map(|(_, v)| *v)
                .collect();
            crossing.sort_by(|a, b| b.total_cmp(a));
            crossing.iter().skip(gamma).sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min);
    Ok(value)
}

/// Exact `Σ_μ α(μ)·payoff(μ,x)` over the support.
pub fn expected_payoff<'a>(instance: &Instance, alpha: &MixedStrategy, x: impl Into<FlowRef<'a>>) -> f64 {
    let x = x.into();
    alpha
        .support()
        .iter()
        .map(|(s, p)| p * payoff(instance, s, x))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Uniform double in `[0,1)` from the top 53 bits of one ChaCha8 output word.
fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Monte Carlo estimate of the expected payoff.
///
/// Draws `samples` i.i.d. scenarios from `alpha` using `ChaCha8Rng` seeded
/// with `seed_from_u64(seed)`. Each draw takes one 64-bit output `w`, forms
/// `u = (w >> 11)·2⁻⁵³` and picks the first support entry whose cumulative
/// probability exceeds `u`. The std-error is the sample standard deviation
/// (n−1 denominator) over `√n`; it is 0 for a single sample.
pub fn estimate_expected_payoff<'a>(
    instance: &Instance,
    alpha: &MixedStrategy,
    x: impl Into<FlowRef<'a>>,
    samples: usize,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::InvalidStrategy("at least one sample is required".into()));
    }
    let x = x.into();
    let support = alpha.support();
    let payoffs: Vec<f64> = support.iter().map(|(s, _)| payoff(instance, s, x)).collect();
    let mut cumulative = Vec::with_capacity(support.len());
    let mut acc = 0.0;
    for (_, p) in support {
        acc += p;
        cumulative.push(acc);
    }
    let fallback = support
        .iter()
        .rposition(|(_, p)| *p > 0.0)
        .unwrap_or(support.len() - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut m2) = (0.0_f64, 0.0_f64);
    for n in 1..=samples {
        let u = unit_interval(&mut rng);
        let k = cumulative.iter().position(|&c| u < c).unwrap_or(fallback);
        let v = payoffs[k];
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    let std_error = if samples > 1 {
        (m2 / (samples - 1) as f64).sqrt() / (samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        std_error,
        samples,
    })
}
