//! Seeded graph generators and the bundled karate-club graph.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GraphError, Result};
use crate::graph::{CompileGraph, DoublyWeightedGraph};

const KARATE_EDGELIST: &str = include_str!("../data/karate_club.edgelist");

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Closed interval weights are drawn from; `lo == hi` gives a constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl WeightRange {
    pub const UNIT: WeightRange = WeightRange { lo: 1.0, hi: 1.0 };
    pub const DEFAULT_VERTEX: WeightRange = WeightRange { lo: 0.01, hi: 1.0 };
    pub const DEFAULT_EDGE: WeightRange = WeightRange { lo: 1.0, hi: 10.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let range = WeightRange { lo, hi };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lo.is_finite() && self.hi.is_finite() && self.lo > 0.0 && self.lo <= self.hi {
            Ok(())
        } else {
            Err(GraphError::InvalidSpec(format!(
                "weight range {}:{} must satisfy 0 < lo <= hi",
                self.lo, self.hi
            )))
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.random_range(self.lo..=self.hi)
        }
    }

    pub fn sample_n(&self, rng: &mut impl Rng, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.sample(rng)).collect()
    }
}

impl FromStr for WeightRange {
    type Err = GraphError;

    /// `unit`, a single number, or `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GraphError::InvalidSpec(format!("cannot parse weight range {s:?}"));
        if s == "unit" {
            return Ok(WeightRange::UNIT);
        }
        let range = match s.split_once(':') {
            Some((lo, hi)) => WeightRange {
                lo: lo.trim().parse().map_err(|_| bad())?,
                hi: hi.trim().parse().map_err(|_| bad())?,
            },
            None => {
                let c: f64 = s.trim().parse().map_err(|_| bad())?;
                WeightRange { lo: c, hi: c }
            }
        };
        range.validate()?;
        Ok(range)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Complete { n: usize },
    Cycle { n: usize },
    /// Every internal vertex has degree `r`; leaves sit `depth` hops from the root.
    RegularTree { r: usize, depth: usize },
    ErdosRenyi { n: usize, p: f64 },
    KarateClub,
}

impl GraphKind {
    pub fn is_stochastic(&self) -> bool {
        matches!(self, GraphKind::ErdosRenyi { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            GraphKind::Cycle { n } if n < 3 => {
                Err(GraphError::InvalidSpec(format!("cycle needs n >= 3, got {n}")))
            }
            GraphKind::RegularTree { r, .. } if r < 1 => {
                Err(GraphError::InvalidSpec("tree needs r >= 1".into()))
            }
            GraphKind::ErdosRenyi { p, .. } if !(0.0..=1.0).contains(&p) => {
                Err(GraphError::InvalidSpec(format!("edge probability {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Complete { n } => write!(f, "complete:{n}"),
            GraphKind::Cycle { n } => write!(f, "cycle:{n}"),
            GraphKind::RegularTree { r, depth } => write!(f, "tree:{r}:{depth}"),
            GraphKind::ErdosRenyi { n, p } => write!(f, "er:{n}:{p}"),
            GraphKind::KarateClub => write!(f, "karate"),
        }
    }
}

impl FromStr for GraphKind {
    type Err = GraphError;

    /// `complete:N`, `cycle:N`, `tree:R:DEPTH`, `er:N:P` or `karate`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || GraphError::InvalidSpec(format!("cannot parse graph spec {s:?}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let int = |i: usize| -> Result<usize> {
            parts.get(i).ok_or_else(bad)?.parse().map_err(|_| bad())
        };
        let kind = match (parts[0], parts.len()) {
            ("complete", 2) => GraphKind::Complete { n: int(1)? },
            ("cycle", 2) => GraphKind::Cycle { n: int(1)? },
            ("tree", 3) => GraphKind::RegularTree {
                r: int(1)?,
                depth: int(2)?,
            },
            ("er", 3) => GraphKind::ErdosRenyi {
                n: int(1)?,
                p: parts[2].parse().map_err(|_| bad())?,
            },
            ("karate", 1) => GraphKind::KarateClub,
            _ => return Err(bad()),
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub seed: u64,
    pub vertex_weights: WeightRange,
    pub edge_weights: WeightRange,
}

impl GeneratorSpec {
    /// Default weight ranges: vertices in `[0.01, 1]`, edges in `[1, 10]`.
    pub fn new(kind: GraphKind, seed: u64) -> Self {
        GeneratorSpec {
            kind,
            seed,
            vertex_weights: WeightRange::DEFAULT_VERTEX,
            edge_weights: WeightRange::DEFAULT_EDGE,
        }
    }

    pub fn unweighted(kind: GraphKind) -> Self {
        GeneratorSpec {
            kind,
            seed: 0,
            vertex_weights: WeightRange::UNIT,
            edge_weights: WeightRange::UNIT,
        }
    }

    pub fn with_weights(mut self, vertex: WeightRange, edge: WeightRange) -> Self {
        self.vertex_weights = vertex;
        self.edge_weights = edge;
        self
    }
}

/// Builds the graph described by `spec`. The skeleton is drawn first, then
/// vertex weights, then edge weights in sorted edge order, all from one
/// seeded stream.
pub fn generate(spec: &GeneratorSpec) -> Result<DoublyWeightedGraph> {
    spec.kind.validate()?;
    spec.vertex_weights.validate()?;
    spec.edge_weights.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let (n, edges) = skeleton(&spec.kind, &mut rng);
    weighted(n, &edges, spec.vertex_weights, spec.edge_weights, &mut rng)
}

pub(crate) fn weighted(
    n: usize,
    edges: &[(usize, usize)],
    vertex: WeightRange,
    edge: WeightRange,
    rng: &mut impl Rng,
) -> Result<DoublyWeightedGraph> {
    let mut sorted = edges.to_vec();
    sorted.sort_unstable();
    let m = vertex.sample_n(rng, n);
    let w = edge.sample_n(rng, sorted.len());
    DoublyWeightedGraph::new(n, &sorted, &m, &w)
}

fn skeleton(kind: &GraphKind, rng: &mut impl Rng) -> (usize, Vec<(usize, usize)>) {
    match *kind {
        GraphKind::Complete { n } => (n, complete_edges(n)),
        GraphKind::Cycle { n } => (n, (0..n).map(|v| ordered(v, (v + 1) % n)).collect()),
        GraphKind::RegularTree { r, depth } => regular_tree_edges(r, depth),
        GraphKind::ErdosRenyi { n, p } => (n, gnp_edges(n, p, rng)),
        GraphKind::KarateClub => karate_edges(),
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

fn complete_edges(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Each pair `u < v` is kept independently with probability `p`, visited in
/// lexicographic order.
pub(crate) fn gnp_edges(n: usize, p: f64, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    complete_edges(n)
        .into_iter()
        .filter(|_| rng.random::<f64>() < p)
        .collect()
}

fn regular_tree_edges(r: usize, depth: usize) -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1;
    for level in 0..depth {
        let children = if level == 0 { r } else { r - 1 };
        let mut next = Vec::new();
        for &parent in &frontier {
            for _ in 0..children {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    (next_id, edges)
}

fn karate_edges() -> (usize, Vec<(usize, usize)>) {
    let edges: Vec<(usize, usize)> = KARATE_EDGELIST
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    (n, edges)
}

pub fn complete(n: usize) -> DoublyWeightedGraph {
    DoublyWeightedGraph::unweighted(n, &complete_edges(n)).expect("complete graph is simple")
}

pub fn cycle(n: usize) -> DoublyWeightedGraph {
    generate(&GeneratorSpec::unweighted(GraphKind::Cycle { n })).expect("cycle needs n >= 3")
}

pub fn regular_tree(r: usize, depth: usize) -> DoublyWeightedGraph {
    let (n, edges) = regular_tree_edges(r, depth);
    DoublyWeightedGraph::unweighted(n, &edges).expect("tree is simple")
}

pub fn star(leaves: usize) -> DoublyWeightedGraph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    DoublyWeightedGraph::unweighted(leaves + 1, &edges).expect("star is simple")
}

pub fn karate_club() -> DoublyWeightedGraph {
    let (n, edges) = karate_edges();
    DoublyWeightedGraph::unweighted(n, &edges).expect("bundled karate club is simple")
}

pub fn erdos_renyi_unweighted(n: usize, p: f64, seed: u64) -> DoublyWeightedGraph {
    generate(&GeneratorSpec::unweighted(GraphKind::ErdosRenyi { n, p }).with_seed(seed))
        .expect("valid G(n, p)")
}

pub fn erdos_renyi_weighted(
    n: usize,
    p: f64,
    vertex: (f64, f64),
    edge: (f64, f64),
    seed: u64,
) -> DoublyWeightedGraph {
    let spec = GeneratorSpec::new(GraphKind::ErdosRenyi { n, p }, seed).with_weights(
        WeightRange {
            lo: vertex.0,
            hi: vertex.1,
        },
        WeightRange {
            lo: edge.0,
            hi: edge.1,
        },
    );
    generate(&spec).expect("valid G(n, p)")
}

impl GeneratorSpec {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Generates one layer per spec and compiles them. Layer `l` is generated
/// with the `l`-th seed drawn from a stream seeded by `seed`; the seeds in
/// `specs` are ignored.
pub fn build_compile_experiment(specs: &[GeneratorSpec], seed: u64) -> Result<CompileGraph> {
    let mut master = rng_from_seed(seed);
    let layers = specs
        .iter()
        .map(|spec| generate(&spec.with_seed(master.next_u64())))
        .collect::<Result<Vec<_>>>()?;
    CompileGraph::compile(&layers)
}

fn er_specs(n: usize, ps: &[f64]) -> Vec<GeneratorSpec> {
    ps.iter()
        .map(|&p| GeneratorSpec::new(GraphKind::ErdosRenyi { n, p }, 0))
        .collect()
}

/// Three layers `G(25, 0.2)`, `G(25, 0.5)`, `G(25, 0.8)` with default weights.
pub fn cg258_specs() -> Vec<GeneratorSpec> {
    er_specs(25, &[0.2, 0.5, 0.8])
}

/// Three independent `G(25, 0.8)` layers with default weights.
pub fn cg888_specs() -> Vec<GeneratorSpec> {
    er_specs(25, &[0.8, 0.8, 0.8])
}
