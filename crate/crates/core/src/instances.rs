//! Instance text format and the named instance families.
//!
//! File format (UTF-8, LF line endings):
//!
//! ```text
//! c <comment>
//! p interdict <nodes> <arcs> <gamma>
//! n <id> s
//! n <id> t
//! a <tail> <head> <capacity>
//! ```
//!
//! Node ids are 1-based. Arc lines appear exactly `<arcs>` times and arcs are
//! numbered 1.. in file order. A capacity is a nonnegative decimal or `inf`.

use std::fmt::Write as _;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, ParseError, Result};
use crate::graph::{Arc, Capacity, Instance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Fig1,
    Fig2a,
    Fig2b,
    Thm6,
    Random,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Family::Fig1),
            "fig2a" => Ok(Family::Fig2a),
            "fig2b" => Ok(Family::Fig2b),
            "thm6" => Ok(Family::Thm6),
            "random" => Ok(Family::Random),
            other => Err(Error::SpecInvalid(format!("unknown family {other:?}"))),
        }
    }
}

/// Which reading of the four-node tightness network to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fig2bVariant {
    /// As drawn: s→w (Γ·K), w→v (K), w→t (K).
    #[default]
    Figure,
    /// As described in prose: s→v (Γ·K), w→v (K), w→t (∞). Node w is
    /// unreachable from s in this reading.
    Prose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub k: usize,
    pub gamma: usize,
    pub seed: u64,
    pub nodes: usize,
    pub arcs: usize,
    pub cap_max: u64,
    pub fig2b_variant: Fig2bVariant,
}

impl GeneratorSpec {
    pub fn new(family: Family, k: usize, gamma: usize) -> Self {
        GeneratorSpec {
            family,
            k,
            gamma,
            seed: 0,
            nodes: 6,
            arcs: 10,
            cap_max: 9,
            fig2b_variant: Fig2bVariant::Figure,
        }
    }

    pub fn random(nodes: usize, arcs: usize, cap_max: u64, gamma: usize, seed: u64) -> Self {
        GeneratorSpec {
            nodes,
            arcs,
            cap_max,
            seed,
            ..GeneratorSpec::new(Family::Random, 0, gamma)
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::SpecInvalid(msg));
        if self.gamma < 1 {
            return bad("gamma must be at least 1".into());
        }
        match self.family {
            Family::Fig1 | Family::Fig2a | Family::Fig2b => {
                if self.k < self.gamma + 1 {
                    return bad(format!(
                        "family requires K ≥ Γ+1 (K={}, Γ={})",
                        self.k, self.gamma
                    ));
                }
            }
            Family::Thm6 => {
                if self.k < 1 {
                    return bad("thm6 requires K ≥ 1".into());
                }
            }
            Family::Random => {
                if self.nodes < 2 {
                    return bad("random requires nodes ≥ 2".into());
                }
                let backbone = backbone_len(self.nodes);
                if self.arcs < backbone {
                    return bad(format!(
                        "random with {} nodes needs at least {backbone} arcs",
                        self.nodes
                    ));
                }
                if self.gamma > self.arcs {
                    return bad("gamma exceeds the arc count".into());
                }
                if self.cap_max < 1 {
                    return bad("cap_max must be at least 1".into());
                }
            }
        }
        Ok(())
    }
}

fn unit() -> Capacity {
    Capacity::Finite(1.0)
}

/// Builds the instance. Arc order: unit arcs first, then the family's
/// special arcs, then the downstream v→t arcs.
pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    spec.check()?;
    let (k, gamma) = (spec.k, spec.gamma);
    let k_f = k as f64;
    // Three-node families: s = 0, v = 1, t = 2.
    let (s, v, t) = (0, 1, 2);
    let instance = match spec.family {
        Family::Fig1 => {
            let mut arcs = vec![Arc::new(s, v, unit()); k];
            arcs.push(Arc::new(s, v, Capacity::Finite(1.5 * k_f)));
            arcs.extend(vec![Arc::new(v, t, Capacity::Infinite); gamma + 1]);
            Instance::new(3, s, t, arcs, gamma)
        }
        Family::Fig2a => {
            let mut arcs = vec![Arc::new(s, v, unit()); k];
            arcs.extend(vec![Arc::new(v, t, Capacity::Infinite); gamma + 1]);
            Instance::new(3, s, t, arcs, gamma)
        }
        Family::Fig2b => {
            // s = 0, v = 1, w = 2, t = 3.
            let (w, t) = (2, 3);
            let mut arcs = vec![Arc::new(s, v, unit()); k];
            let scaled = Capacity::Finite(gamma as f64 * k_f);
            match spec.fig2b_variant {
                Fig2bVariant::Figure => arcs.extend([
                    Arc::new(s, w, scaled),
                    Arc::new(w, v, Capacity::Finite(k_f)),
                    Arc::new(w, t, Capacity::Finite(k_f)),
                ]),
                Fig2bVariant::Prose => arcs.extend([
                    Arc::new(s, v, scaled),
                    Arc::new(w, v, Capacity::Finite(k_f)),
                    Arc::new(w, t, Capacity::Infinite),
                ]),
            }
            arcs.extend(vec![Arc::new(v, t, Capacity::Infinite); gamma]);
            Instance::new(4, s, t, arcs, gamma)
        }
        Family::Thm6 => {
            let mut arcs = vec![Arc::new(s, v, unit()); gamma];
            arcs.extend(vec![Arc::new(s, v, Capacity::Finite(k_f)); gamma / 2]);
            arcs.extend(vec![Arc::new(v, t, Capacity::Infinite); gamma + 1]);
            Instance::new(3, s, t, arcs, gamma)
        }
        Family::Random => random_layered(spec),
    };
    instance.map_err(|e| Error::SpecInvalid(e.to_string()))
}

fn backbone_len(nodes: usize) -> usize {
    match nodes {
        2 => 1,
        3 => 2,
        _ => 3,
    }
}

/// Layered DAG: s, two internal layers, t. Node 0 is s, node `n−1` is t,
/// internal nodes `1..n−1` are split into a first layer of `⌈(n−2)/2⌉`
/// nodes and a second layer with the rest. A backbone s→L1→L2→t path is
/// laid first; remaining arcs join uniformly drawn node pairs whose layers
/// strictly increase. Capacities are uniform integers in `[1, cap_max]`.
fn random_layered(spec: &GeneratorSpec) -> Result<Instance> {
    let n = spec.nodes;
    let (s, t) = (0, n - 1);
    let inner = n - 2;
    let first = inner.div_ceil(2);
    let layer = |v: usize| -> usize {
        if v == s {
            0
        } else if v == t {
            3
        } else if v <= first {
            1
        } else {
            2
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut draw = |bound: u64| -> u64 { rng.next_u64() % bound };

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    match inner {
        0 => pairs.push((s, t)),
        1 => pairs.extend([(s, 1), (1, t)]),
        _ => {
            let a = 1 + draw(first as u64) as usize;
            let b = first + 1 + draw((inner - first) as u64) as usize;
            pairs.extend([(s, a), (a, b), (b, t)]);
        }
    }
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |w| (u, w)))
        .filter(|&(u, w)| layer(u) < layer(w))
        .collect();
    while pairs.len() < spec.arcs {
        let pick = candidates[draw(candidates.len() as u64) as usize];
        pairs.push(pick);
    }
    let arcs = pairs
        .into_iter()
        .map(|(u, w)| Arc::new(u, w, Capacity::Finite((1 + draw(spec.cap_max)) as f64)))
        .collect();
    Instance::new(n, s, t, arcs, spec.gamma)
}

/// Writes the instance in the text format. Capacities use the shortest
/// decimal that round-trips, or `inf`.
pub fn serialize(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p interdict {} {} {}",
        instance.node_count(),
        instance.arc_count(),
        instance.gamma()
    );
    let _ = writeln!(out, "n {} s", instance.source() + 1);
    let _ = writeln!(out, "n {} t", instance.sink() + 1);
    for arc in instance.arcs() {
        let _ = writeln!(out, "a {} {} {}", arc.tail + 1, arc.head + 1, arc.capacity);
    }
    out
}

pub fn parse(text: &str) -> Result<Instance> {
    let err = |line: usize, reason: &str| -> Error {
        ParseError {
            line,
            reason: reason.to_string(),
        }
        .into()
    };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut source: Option<usize> = None;
    let mut sink: Option<usize> = None;
    let mut arcs: Vec<Arc> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(err(line_no, "duplicate problem line"));
                }
                if rest.len() != 4 || rest[0] != "interdict" {
                    return Err(err(line_no, "expected `p interdict <n> <m> <gamma>`"));
                }
                let n: usize = rest[1].parse().map_err(|_| err(line_no, "bad node count"))?;
                let m: usize = rest[2].parse().map_err(|_| err(line_no, "bad arc count"))?;
                let g: usize = rest[3].parse().map_err(|_| err(line_no, "gamma out of range"))?;
                if n < 2 {
                    return Err(err(line_no, "need at least 2 nodes"));
                }
                if g < 1 || g > m {
                    return Err(err(line_no, "gamma out of range"));
                }
                header = Some((n, m, g));
            }
            "n" => {
                let Some((n, _, _)) = header else {
                    return Err(err(line_no, "node line before problem line"));
                };
                if rest.len() != 2 {
                    return Err(err(line_no, "expected `n <id> s|t`"));
                }
                let id = parse_node(rest[0], n).ok_or_else(|| err(line_no, "node id out of range"))?;
                let slot = match rest[1] {
                    "s" => &mut source,
                    "t" => &mut sink,
                    _ => return Err(err(line_no, "node designator must be s or t")),
                };
                if slot.is_some() {
                    return Err(err(line_no, "terminal designated twice"));
                }
                *slot = Some(id);
            }
            "a" => {
                let Some((n, m, _)) = header else {
                    return Err(err(line_no, "arc line before problem line"));
                };
                if rest.len() != 3 {
                    return Err(err(line_no, "expected `a <tail> <head> <capacity>`"));
                }
                if arcs.len() == m {
                    return Err(err(line_no, "more arc lines than declared"));
                }
                let tail = parse_node(rest[0], n).ok_or_else(|| err(line_no, "tail out of range"))?;
                let head = parse_node(rest[1], n).ok_or_else(|| err(line_no, "head out of range"))?;
                let capacity = parse_capacity(rest[2]).ok_or_else(|| err(line_no, "bad capacity"))?;
                arcs.push(Arc::new(tail, head, capacity));
            }
            _ => return Err(err(line_no, "unknown line type")),
        }
    }

    let Some((n, m, gamma)) = header else {
        return Err(err(last_line.max(1), "missing problem line"));
    };
    let source = source.ok_or_else(|| err(last_line, "missing source designator"))?;
    let sink = sink.ok_or_else(|| err(last_line, "missing sink designator"))?;
    if source == sink {
        return Err(err(last_line, "source equals sink"));
    }
    if arcs.len() != m {
        return Err(err(last_line, "fewer arc lines than declared"));
    }
    // Terminal checks need both designators, so they report the arc's line.
    for (i, arc) in arcs.iter().enumerate() {
        let line = arc_line(text, i);
        if arc.head == source {
            return Err(err(line, "arc enters source"));
        }
        if arc.tail == sink {
            return Err(err(line, "arc leaves sink"));
        }
    }
    Instance::new(n, source, sink, arcs, gamma).map_err(|e| err(last_line, &e.to_string()))
}

fn parse_node(token: &str, n: usize) -> Option<usize> {
    let id: usize = token.parse().ok()?;
    (1..=n).contains(&id).then(|| id - 1)
}

fn parse_capacity(token: &str) -> Option<Capacity> {
    if token == "inf" {
        return Some(Capacity::Infinite);
    }
    let c: f64 = token.parse().ok()?;
    (c.is_finite() && c >= 0.0).then_some(Capacity::Finite(c))
}

/// 1-based line number of the `index`-th arc line.
fn arc_line(text: &str, index: usize) -> usize {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with("a ") || l.trim() == "a")
        .nth(index)
        .map_or(0, |(i, _)| i + 1)
}
