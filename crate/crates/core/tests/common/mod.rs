//! Independent oracles and instance strategies shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use interdict_core::graph::Instance;
use interdict_core::instances::{generate, GeneratorSpec};
use itertools::Itertools;
use proptest::prelude::*;

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

/// Random layered instances with at most `max_nodes` nodes and 12 arcs.
pub fn random_instance(max_nodes: usize, gammas: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Instance> {
    (3..=max_nodes, 0usize..=9, 1u64..=9, gammas, any::<u64>()).prop_filter_map(
        "budget exceeds arc count",
        |(nodes, extra, cap_max, gamma, seed)| {
            let backbone = if nodes == 3 { 2 } else { 3 };
            let arcs = (backbone + extra).min(12);
            (gamma <= arcs).then(|| generate(&GeneratorSpec::random(nodes, arcs, cap_max, gamma, seed)).unwrap())
        },
    )
}

/// The instance generated for corpus index `i` (criteria 4 and 5).
pub fn corpus_instance(i: u64, gamma: usize) -> Instance {
    let nodes = 3 + (i % 5) as usize;
    let backbone = if nodes == 3 { 2 } else { 3 };
    let arcs = (backbone + 2 + (i % 7) as usize).min(12);
    let cap_max = 3 + i % 7;
    generate(&GeneratorSpec::random(nodes, arcs, cap_max, gamma.min(arcs), 1000 + i)).unwrap()
}

/// Every s-t cut as a source-side mask, by brute force.
pub fn all_cuts(instance: &Instance) -> Vec<Vec<bool>> {
    let n = instance.node_count();
    let (s, t) = (instance.source(), instance.sink());
    (0u32..1 << n)
        .map(|bits| (0..n).map(|v| bits & (1 << v) != 0).collect::<Vec<bool>>())
        .filter(|mask| mask[s] && !mask[t])
        .collect()
}

pub fn cut_capacity(instance: &Instance, caps: &[f64], mask: &[bool]) -> f64 {
    instance
        .arcs()
        .iter()
        .zip(caps)
        .filter(|(a, _)| mask[a.tail] && !mask[a.head])
        .map(|(_, c)| c)
        .sum()
}

/// Max flow through the min-cut side of duality.
pub fn min_cut_value(instance: &Instance, caps: &[f64]) -> f64 {
    all_cuts(instance)
        .iter()
        .map(|m| cut_capacity(instance, caps, m))
        .fold(f64::INFINITY, f64::min)
}

/// Z_NI by removing every Γ-subset and evaluating every cut.
pub fn ni_oracle(instance: &Instance) -> f64 {
    let caps = instance.capacities();
    (0..instance.arc_count())
        .combinations(instance.gamma())
        .map(|removed| {
            let mut c = caps.to_vec();
            for e in removed {
                c[e] = 0.0;
            }
            min_cut_value(instance, &c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// All simple s-t paths as arc-index sequences.
pub fn dfs_paths(instance: &Instance) -> BTreeSet<Vec<usize>> {
    fn go(inst: &Instance, v: usize, visited: &mut Vec<usize>, path: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        if v == inst.sink() {
            out.insert(path.clone());
            return;
        }
        for (i, a) in inst.arcs().iter().enumerate() {
            if a.tail == v && !visited.contains(&a.head) {
                visited.push(a.head);
                path.push(i);
                go(inst, a.head, visited, path, out);
                path.pop();
                visited.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(instance, instance.source(), &mut vec![instance.source()], &mut Vec::new(), &mut out);
    out
}

/// `max_θ min_S Cap(S,θ) − Γθ` over every breakpoint candidate: 0, each
/// capacity, and each crossing of two cut lines between consecutive
/// capacities.
pub fn lo_sweep(instance: &Instance) -> f64 {
    let caps = instance.capacities();
    let gamma = instance.gamma() as f64;
    let cuts = all_cuts(instance);
    let value_at = |theta: f64| -> f64 {
        let clipped: Vec<f64> = caps.iter().map(|u| u.min(theta)).collect();
        cuts.iter()
            .map(|m| cut_capacity(instance, &clipped, m))
            .fold(f64::INFINITY, f64::min)
            - gamma * theta
    };
    let mut points: Vec<f64> = caps.to_vec();
    points.push(0.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let mut candidates = points.clone();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        // Inside (lo, hi) every cut is c + kθ.
        let lines: Vec<(f64, f64)> = cuts
            .iter()
            .map(|m| {
                instance
                    .arcs()
                    .iter()
                    .zip(caps)
                    .filter(|(a, _)| m[a.tail] && !m[a.head])
                    .fold((0.0, 0.0), |(c, k), (_, &u)| if u <= mid { (c + u, k) } else { (c, k + 1.0) })
            })
            .collect();
        for (i, &(c1, k1)) in lines.iter().enumerate() {
            for &(c2, k2) in &lines[i + 1..] {
                if k1 != k2 {
                    let theta = (c2 - c1) / (k1 - k2);
                    if theta > lo && theta < hi {
                        candidates.push(theta);
                    }
                }
            }
        }
    }
    candidates
        .into_iter()
        .map(value_at)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `max c·x` subject to `Ax ≤ b`, `0 ≤ x ≤ upper`, by enumerating vertices.
/// Returns `None` when infeasible.
pub fn lp_vertex_oracle(c: &[f64], a: &[Vec<f64>], b: &[f64], upper: f64) -> Option<f64> {
    let n = c.len();
    let mut planes: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut lo = vec![0.0; n];
        lo[j] = -1.0;
        planes.push((lo, 0.0));
        let mut hi = vec![0.0; n];
        hi[j] = 1.0;
        planes.push((hi, upper));
    }
    let feasible = |x: &[f64]| planes.iter().all(|(r, rhs)| dot(r, x) <= rhs + 1e-7);
    let mut best: Option<f64> = None;
    for active in (0..planes.len()).combinations(n) {
        let m: Vec<Vec<f64>> = active.iter().map(|&i| planes[i].0.clone()).collect();
        let rhs: Vec<f64> = active.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = gauss(m, rhs) {
            if feasible(&x) {
                let v = dot(c, &x);
                best = Some(best.map_or(v, |b: f64| b.max(v)));
            }
        }
    }
    best
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gauss(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-9 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                let pivot = m[col].clone();
                for (k, v) in m[r].iter_mut().enumerate().skip(col).take(n - col) {
                    *v -= f * pivot[k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
}
