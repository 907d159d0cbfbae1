//! Directed multigraph instances, max flow / min cut, flow validation,
//! path decomposition and s-t path enumeration.
//!
//! Node ids are 0-based internally; the text format and all user-facing
//! output use 1-based ids. Arcs are identified by their position in the
//! instance's arc list ([`ArcId`]), displayed 1-based as `e1, e2, ...`.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Largest node count for which `2^(n-2)` cut enumeration is attempted.
pub const CUT_NODE_LIMIT: usize = 12;

/// Relative tolerance used by [`validate_flow`].
pub const VALIDATION_TOLERANCE: f64 = 1e-6;

/// Position of an arc in the instance's arc list (0-based index, 1-based display).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "usize")]
pub struct ArcId(pub usize);

impl ArcId {
    pub fn index(self) -> usize {
        self.0
    }

    /// 1-based arc number as used in instance files.
    pub fn number(self) -> usize {
        self.0 + 1
    }
}

impl From<ArcId> for usize {
    fn from(id: ArcId) -> usize {
        id.number()
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    Infinite,
}

impl Capacity {
    pub fn is_infinite(self) -> bool {
        matches!(self, Capacity::Infinite)
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub capacity: Capacity,
}

impl Arc {
    pub fn new(tail: NodeId, head: NodeId, capacity: Capacity) -> Self {
        Arc {
            tail,
            head,
            capacity,
        }
    }
}

/// An interdiction instance: graph, terminals, capacities and budget Γ.
///
/// Infinite capacities are replaced by `big_m = 1 + Σ finite capacities`
/// in [`Instance::capacities`]; every kernel works on those finite values.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    node_count: usize,
    source: NodeId,
    sink: NodeId,
    arcs: Vec<Arc>,
    gamma: usize,
    caps: Vec<f64>,
    big_m: f64,
}

impl Instance {
    pub fn new(
        node_count: usize,
        source: NodeId,
        sink: NodeId,
        arcs: Vec<Arc>,
        gamma: usize,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if node_count < 2 {
            return invalid(format!("need at least 2 nodes, got {node_count}"));
        }
        if source >= node_count || sink >= node_count {
            return invalid("terminal out of range".into());
        }
        if source == sink {
            return invalid("source equals sink".into());
        }
        for (i, arc) in arcs.iter().enumerate() {
            let id = ArcId(i);
            if arc.tail >= node_count || arc.head >= node_count {
                return invalid(format!("{id} has an endpoint out of range"));
            }
            if arc.head == source {
                return invalid(format!("{id} enters the source"));
            }
            if arc.tail == sink {
                return invalid(format!("{id} leaves the sink"));
            }
            if let Capacity::Finite(c) = arc.capacity {
                if !c.is_finite() || c < 0.0 {
                    return invalid(format!("{id} has invalid capacity {c}"));
                }
            }
        }
        if gamma < 1 || gamma > arcs.len() {
            return invalid(format!(
                "gamma {gamma} out of range 1..={}",
                arcs.len()
            ));
        }
        let finite_sum: f64 = arcs
            .iter()
            .filter_map(|a| match a.capacity {
                Capacity::Finite(c) => Some(c),
                Capacity::Infinite => None,
            })
            .sum();
        let big_m = 1.0 + finite_sum;
        let caps = arcs
            .iter()
            .map(|a| match a.capacity {
                Capacity::Finite(c) => c,
                Capacity::Infinite => big_m,
            })
            .collect();
        Ok(Instance {
            node_count,
            source,
            sink,
            arcs,
            gamma,
            caps,
            big_m,
        })
    }

    /// Same graph with a different interdiction budget.
    pub fn with_gamma(&self, gamma: usize) -> Result<Self> {
        Instance::new(
            self.node_count,
            self.source,
            self.sink,
            self.arcs.clone(),
            gamma,
        )
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id.0]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> {
        (0..self.arcs.len()).map(ArcId)
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Effective capacities with big-M substituted for infinity.
    pub fn capacities(&self) -> &[f64] {
        &self.caps
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// Arcs leaving `v`, in arc-id order.
    pub fn out_arcs(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(move |(_, a)| a.tail == v)
            .map(|(i, _)| ArcId(i))
    }

    fn out_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.tail].push(i);
        }
        adj
    }
}

/// Arc flow `x` together with its value `Val(x)` (net inflow of the sink).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcFlow {
    pub values: Vec<f64>,
    pub value: f64,
}

impl ArcFlow {
    pub fn new(instance: &Instance, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), instance.arc_count(), "arc flow length");
        let value = instance
            .arcs()
            .iter()
            .zip(&values)
            .filter(|(a, _)| a.head == instance.sink())
            .map(|(_, x)| *x)
            .sum();
        ArcFlow { values, value }
    }

    pub fn zero(instance: &Instance) -> Self {
        ArcFlow::new(instance, vec![0.0; instance.arc_count()])
    }

    pub fn get(&self, id: ArcId) -> f64 {
        self.values[id.0]
    }
}

/// An s-t path as its arc sequence.
pub type Path = Vec<ArcId>;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PathFlow {
    pub entries: Vec<(Path, f64)>,
}

impl PathFlow {
    pub fn new(entries: Vec<(Path, f64)>) -> Self {
        PathFlow { entries }
    }

    pub fn value(&self) -> f64 {
        self.entries.iter().map(|(_, x)| x).sum()
    }

    /// Per-arc load `Σ_{P∋e} x_P`.
    pub fn arc_loads(&self, arc_count: usize) -> Vec<f64> {
        let mut loads = vec![0.0; arc_count];
        for (path, amount) in &self.entries {
            for e in path {
                loads[e.0] += amount;
            }
        }
        loads
    }

    pub fn to_arc_flow(&self, instance: &Instance) -> ArcFlow {
        ArcFlow::new(instance, self.arc_loads(instance.arc_count()))
    }
}

/// An s-t cut `S` evaluated against capacities `u` and, optionally, a clip level θ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutReport {
    pub s_side: Vec<NodeId>,
    pub crossing: Vec<ArcId>,
    /// `Cap(S)`.
    pub capacity: f64,
    pub theta: Option<f64>,
    /// `Cap(S,θ) = Σ min(u_e, θ)`; equals `capacity` when no θ is given.
    pub capacity_at_theta: f64,
    /// `A(S,θ)`: crossing arcs with `θ ≤ u_e`.
    pub tight_at_or_below: Vec<ArcId>,
    /// `B(S,θ)`: crossing arcs with `θ < u_e`.
    pub strictly_below: Vec<ArcId>,
}

impl CutReport {
    /// Evaluate the cut given by membership mask `in_s`.
    pub fn evaluate(instance: &Instance, caps: &[f64], in_s: &[bool], theta: Option<f64>) -> Self {
        let crossing: Vec<ArcId> = instance
            .arcs()
            .iter()
            .enumerate()
            .filter(|(_, a)| in_s[a.tail] && !in_s[a.head])
            .map(|(i, _)| ArcId(i))
            .collect();
        let capacity = crossing.iter().map(|e| caps[e.0]).sum();
        let (capacity_at_theta, tight, strict) = match theta {
            Some(th) => (
                crossing.iter().map(|e| caps[e.0].min(th)).sum(),
                crossing.iter().copied().filter(|e| th <= caps[e.0]).collect(),
                crossing.iter().copied().filter(|e| th < caps[e.0]).collect(),
            ),
            None => (capacity, Vec::new(), Vec::new()),
        };
        CutReport {
            s_side: (0..instance.node_count()).filter(|&v| in_s[v]).collect(),
            crossing,
            capacity,
            theta,
            capacity_at_theta,
            tight_at_or_below: tight,
            strictly_below: strict,
        }
    }
}

struct MaxFlowResult {
    value: f64,
    flow: Vec<f64>,
    reachable: Vec<bool>,
}

/// Dinic's algorithm over a residual graph built in arc-id order.
/// Forward residual edge of arc `i` is `2i`, its reverse is `2i + 1`.
struct Dinic {
    head: Vec<usize>,
    residual: Vec<f64>,
    adj: Vec<Vec<usize>>,
    level: Vec<i64>,
    cursor: Vec<usize>,
    eps: f64,
}

impl Dinic {
    fn new(instance: &Instance, caps: &[f64]) -> Self {
        let n = instance.node_count();
        let m = instance.arc_count();
        let mut head = Vec::with_capacity(2 * m);
        let mut residual = Vec::with_capacity(2 * m);
        let mut adj = vec![Vec::new(); n];
        for (i, a) in instance.arcs().iter().enumerate() {
            head.push(a.head);
            residual.push(caps[i].max(0.0));
            adj[a.tail].push(2 * i);
            head.push(a.tail);
            residual.push(0.0);
            adj[a.head].push(2 * i + 1);
        }
        let scale = caps.iter().fold(1.0_f64, |acc, &c| acc.max(c));
        Dinic {
            head,
            residual,
            adj,
            level: vec![-1; n],
            cursor: vec![0; n],
            eps: 1e-12 * scale,
        }
    }

    fn bfs(&mut self, s: NodeId, t: NodeId) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.head[e];
                if self.residual[e] > self.eps && self.level[w] < 0 {
                    self.level[w] = self.level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: NodeId, t: NodeId, pushed: f64) -> f64 {
        if v == t {
            return pushed;
        }
        while self.cursor[v] < self.adj[v].len() {
            let e = self.adj[v][self.cursor[v]];
            let w = self.head[e];
            if self.residual[e] > self.eps && self.level[w] == self.level[v] + 1 {
                let got = self.dfs(w, t, pushed.min(self.residual[e]));
                if got > 0.0 {
                    self.residual[e] -= got;
                    self.residual[e ^ 1] += got;
                    return got;
                }
            }
            self.cursor[v] += 1;
        }
        0.0
    }

    fn run(mut self, instance: &Instance, caps: &[f64]) -> MaxFlowResult {
        let (s, t) = (instance.source(), instance.sink());
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
            }
        }
        let flow: Vec<f64> = (0..instance.arc_count())
            .map(|i| self.residual[2 * i + 1].min(caps[i].max(0.0)))
            .collect();
        // Source side of the minimal cut: nodes reachable in the residual graph.
        let mut reachable = vec![false; instance.node_count()];
        reachable[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adj[v] {
                let w = self.head[e];
                if self.residual[e] > self.eps && !reachable[w] {
                    reachable[w] = true;
                    queue.push_back(w);
                }
            }
        }
        let value = instance
            .arcs()
            .iter()
            .zip(&flow)
            .filter(|(a, _)| a.head == t)
            .map(|(_, x)| x)
            .sum();
        MaxFlowResult {
            value,
            flow,
            reachable,
        }
    }
}

fn run_max_flow(instance: &Instance, caps: &[f64]) -> MaxFlowResult {
    assert_eq!(caps.len(), instance.arc_count(), "capacity vector length");
    Dinic::new(instance, caps).run(instance, caps)
}

/// Maximum s-t flow under the given per-arc capacities.
pub fn max_flow(instance: &Instance, caps: &[f64]) -> (f64, ArcFlow) {
    let res = run_max_flow(instance, caps);
    (res.value, ArcFlow::new(instance, res.flow))
}

/// Maximum flow value under the instance's own capacities.
pub fn nominal_max_flow(instance: &Instance) -> f64 {
    run_max_flow(instance, instance.capacities()).value
}

/// Capacities `u(θ) = min(u_e, θ)`.
pub fn clipped_capacities(caps: &[f64], theta: f64) -> Vec<f64> {
    caps.iter().map(|&u| u.min(theta)).collect()
}

/// Source-side-minimal minimum cut. With `theta`, the cut is minimal for
/// `u(θ)` and the report carries `Cap(S,θ)`, `A(S,θ)` and `B(S,θ)`.
pub fn min_cut(instance: &Instance, caps: &[f64], theta: Option<f64>) -> CutReport {
    let flow_caps = match theta {
        Some(th) => clipped_capacities(caps, th),
        None => caps.to_vec(),
    };
    let res = run_max_flow(instance, &flow_caps);
    CutReport::evaluate(instance, caps, &res.reachable, theta)
}

/// Max flow value with the minimal cut's source-side mask.
pub(crate) fn max_flow_with_cut(instance: &Instance, caps: &[f64]) -> (f64, Vec<f64>, Vec<bool>) {
    let res = run_max_flow(instance, caps);
    (res.value, res.flow, res.reachable)
}

/// All s-t cuts as membership masks, in binary-counter order over the
/// non-terminal nodes.
pub fn enumerate_cuts(instance: &Instance) -> Result<Vec<Vec<bool>>> {
    let n = instance.node_count();
    if n > CUT_NODE_LIMIT {
        return Err(Error::CutLimitExceeded {
            nodes: n,
            limit: CUT_NODE_LIMIT,
        });
    }
    let inner: Vec<NodeId> = (0..n)
        .filter(|&v| v != instance.source() && v != instance.sink())
        .collect();
    let cuts = (0u32..1 << inner.len())
        .map(|bits| {
            let mut mask = vec![false; n];
            mask[instance.source()] = true;
            for (k, &v) in inner.iter().enumerate() {
                if bits & (1 << k) != 0 {
                    mask[v] = true;
                }
            }
            mask
        })
        .collect();
    Ok(cuts)
}

/// Path decomposition of an arc flow; flow on cycles is discarded.
pub fn decompose(instance: &Instance, flow: &ArcFlow) -> PathFlow {
    let scale = flow.values.iter().fold(1.0_f64, |acc, &x| acc.max(x.abs()));
    let eps = 1e-12 * scale;
    let adj = instance.out_adjacency();
    let mut rest: Vec<f64> = flow.values.iter().map(|&x| x.max(0.0)).collect();
    let mut entries: Vec<(Path, f64)> = Vec::new();
    let (s, t) = (instance.source(), instance.sink());

    let next_arc = |rest: &[f64], v: NodeId| adj[v].iter().copied().find(|&e| rest[e] > eps);

    // pos[v] = index in `walk_nodes` when v is on the current walk
    let mut pos = vec![usize::MAX; instance.node_count()];
    'outer: loop {
        let mut walk: Vec<usize> = Vec::new();
        let mut walk_nodes: Vec<NodeId> = vec![s];
        pos.iter_mut().for_each(|p| *p = usize::MAX);
        pos[s] = 0;
        let mut v = s;
        while v != t {
            let Some(e) = next_arc(&rest, v) else {
                if v == s {
                    break 'outer;
                }
                // Conservation dust: drop the arc that led here and restart.
                let last = *walk.last().expect("non-source node reached by an arc");
                rest[last] = 0.0;
                continue 'outer;
            };
            let w = instance.arcs()[e].head;
            if pos[w] != usize::MAX {
                // Cancel the cycle closed by e.
                let start = pos[w];
                let mut cycle: Vec<usize> = walk[start..].to_vec();
                cycle.push(e);
                let amount = cycle.iter().map(|&a| rest[a]).fold(f64::INFINITY, f64::min);
                for &a in &cycle {
                    rest[a] -= amount;
                    if rest[a] <= eps {
                        rest[a] = 0.0;
                    }
                }
                for &u in &walk_nodes[start + 1..] {
                    pos[u] = usize::MAX;
                }
                walk.truncate(start);
                walk_nodes.truncate(start + 1);
                v = w;
                continue;
            }
            walk.push(e);
            walk_nodes.push(w);
            pos[w] = walk_nodes.len() - 1;
            v = w;
        }
        let amount = walk.iter().map(|&a| rest[a]).fold(f64::INFINITY, f64::min);
        for &a in &walk {
            rest[a] -= amount;
            if rest[a] <= eps {
                rest[a] = 0.0;
            }
        }
        entries.push((walk.into_iter().map(ArcId).collect(), amount));
    }
    PathFlow::new(entries)
}

/// All simple s-t paths in lexicographic order of their arc-id sequences.
pub fn enumerate_paths(instance: &Instance, limit: usize) -> Result<Vec<Path>> {
    fn visit(
        instance: &Instance,
        adj: &[Vec<usize>],
        v: NodeId,
        on_path: &mut [bool],
        current: &mut Vec<ArcId>,
        out: &mut Vec<Path>,
        limit: usize,
    ) -> Result<()> {
        if v == instance.sink() {
            if out.len() == limit {
                return Err(Error::PathLimitExceeded { limit });
            }
            out.push(current.clone());
            return Ok(());
        }
        for &e in &adj[v] {
            let w = instance.arcs()[e].head;
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            current.push(ArcId(e));
            visit(instance, adj, w, on_path, current, out, limit)?;
            current.pop();
            on_path[w] = false;
        }
        Ok(())
    }

    let adj = instance.out_adjacency();
    let mut on_path = vec![false; instance.node_count()];
    on_path[instance.source()] = true;
    let mut out = Vec::new();
    visit(
        instance,
        &adj,
        instance.source(),
        &mut on_path,
        &mut Vec::new(),
        &mut out,
        limit,
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowRef<'a> {
    Arc(&'a ArcFlow),
    Path(&'a PathFlow),
}

impl<'a> From<&'a ArcFlow> for FlowRef<'a> {
    fn from(f: &'a ArcFlow) -> Self {
        FlowRef::Arc(f)
    }
}

impl<'a> From<&'a PathFlow> for FlowRef<'a> {
    fn from(f: &'a PathFlow) -> Self {
        FlowRef::Path(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    WrongLength { expected: usize, found: usize },
    NegativeFlow(ArcId),
    Capacity(ArcId),
    Conservation(NodeId),
    NegativePathAmount(usize),
    NotSimpleStPath(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

fn exceeds(excess: f64, scale: f64) -> bool {
    excess > VALIDATION_TOLERANCE * scale.abs().max(1.0)
}

/// Lists every violated capacity, sign and conservation constraint.
pub fn validate_flow<'a>(instance: &Instance, flow: impl Into<FlowRef<'a>>) -> ValidationReport {
    let mut violations = Vec::new();
    let m = instance.arc_count();
    let caps = instance.capacities();
    let loads = match flow.into() {
        FlowRef::Arc(f) => {
            if f.values.len() != m {
                violations.push(Violation {
                    kind: ViolationKind::WrongLength {
                        expected: m,
                        found: f.values.len(),
                    },
                    magnitude: (f.values.len() as f64 - m as f64).abs(),
                });
                return ValidationReport { violations };
            }
            f.values.clone()
        }
        FlowRef::Path(p) => {
            for (k, (path, amount)) in p.entries.iter().enumerate() {
                if *amount < 0.0 && exceeds(-amount, 1.0) {
                    violations.push(Violation {
                        kind: ViolationKind::NegativePathAmount(k),
                        magnitude: -amount,
                    });
                }
                if !is_simple_st_path(instance, path) {
                    violations.push(Violation {
                        kind: ViolationKind::NotSimpleStPath(k),
                        magnitude: amount.abs(),
                    });
                }
            }
            if violations.iter().any(|v| matches!(v.kind, ViolationKind::NotSimpleStPath(_))) {
                return ValidationReport { violations };
            }
            p.arc_loads(m)
        }
    };
    for (i, &x) in loads.iter().enumerate() {
        if x < 0.0 && exceeds(-x, 1.0) {
            violations.push(Violation {
                kind: ViolationKind::NegativeFlow(ArcId(i)),
                magnitude: -x,
            });
        }
        if exceeds(x - caps[i], caps[i]) {
            violations.push(Violation {
                kind: ViolationKind::Capacity(ArcId(i)),
                magnitude: x - caps[i],
            });
        }
    }
    let mut balance = vec![0.0; instance.node_count()];
    let mut through = vec![0.0_f64; instance.node_count()];
    for (a, &x) in instance.arcs().iter().zip(&loads) {
        balance[a.head] += x;
        balance[a.tail] -= x;
        through[a.head] += x.abs();
    }
    for v in 0..instance.node_count() {
        if v == instance.source() || v == instance.sink() {
            continue;
        }
        if exceeds(balance[v].abs(), through[v]) {
            violations.push(Violation {
                kind: ViolationKind::Conservation(v),
                magnitude: balance[v].abs(),
            });
        }
    }
    ValidationReport { violations }
}

fn is_simple_st_path(instance: &Instance, path: &[ArcId]) -> bool {
    let mut seen = vec![false; instance.node_count()];
    let mut v = instance.source();
    seen[v] = true;
    for e in path {
        let Some(arc) = instance.arcs().get(e.0) else {
            return false;
        };
        if arc.tail != v || seen[arc.head] {
            return false;
        }
        v = arc.head;
        seen[v] = true;
    }
    v == instance.sink() && !path.is_empty()
}
