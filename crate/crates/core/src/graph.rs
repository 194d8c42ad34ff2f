//! Doubly-weighted monolayer and multiplex graphs, and the compile-graph
//! construction that stacks layers over a shared vertex set.
//!
//! Vertex ids are dense `0..n`. Layers are numbered from 1 in every public
//! report ([`LayerId`]) but addressed by a zero-based index internally.
//! All graphs are simple, undirected and immutable once built.

use std::fmt;

use serde::Serialize;

use crate::error::{GraphError, Result};

/// One-based layer number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct LayerId(usize);

impl LayerId {
    pub fn new(number: usize) -> Option<Self> {
        (number >= 1).then_some(LayerId(number))
    }

    pub fn from_index(index: usize) -> Self {
        LayerId(index + 1)
    }

    pub fn number(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for LayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The copy `x^i` of vertex `x` living in layer `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateVertex {
    pub vertex: usize,
    pub layer: LayerId,
}

impl StateVertex {
    /// `layer_index` is zero-based.
    pub fn new(vertex: usize, layer_index: usize) -> Self {
        StateVertex {
            vertex,
            layer: LayerId::from_index(layer_index),
        }
    }
}

impl fmt::Display for StateVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.vertex, self.layer)
    }
}

/// Adjacency entry: the neighbor and the index of the connecting edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    pub neighbor: usize,
    pub edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

impl Edge {
    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u == x || self.v == x
    }

    pub fn other(&self, x: usize) -> usize {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

fn check_weight(value: f64, element: impl FnOnce() -> String) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(GraphError::NonPositiveWeight {
            element: element(),
            value,
        })
    }
}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Builds sorted edge and adjacency tables, rejecting loops and duplicates.
/// Endpoints must already be range-checked.
fn index_edges(
    node_count: usize,
    raw: impl IntoIterator<Item = (usize, usize, f64)>,
) -> Result<(Vec<(usize, usize, f64)>, Vec<Vec<Incidence>>)> {
    let mut edges: Vec<(usize, usize, f64)> = raw
        .into_iter()
        .map(|(a, b, w)| {
            let (u, v) = ordered(a, b);
            (u, v, w)
        })
        .collect();
    edges.sort_by_key(|&(u, v, _)| (u, v));
    for pair in edges.windows(2) {
        if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
            return Err(GraphError::DuplicateEdge(pair[0].0, pair[0].1));
        }
    }
    let mut adjacency = vec![Vec::new(); node_count];
    for (idx, &(u, v, _)) in edges.iter().enumerate() {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        adjacency[u].push(Incidence { neighbor: v, edge: idx });
        adjacency[v].push(Incidence { neighbor: u, edge: idx });
    }
    for list in &mut adjacency {
        list.sort_by_key(|inc| inc.neighbor);
    }
    Ok((edges, adjacency))
}

fn find_incidence(list: &[Incidence], neighbor: usize) -> Option<usize> {
    list.binary_search_by_key(&neighbor, |inc| inc.neighbor)
        .ok()
        .map(|pos| list[pos].edge)
}

/// A single layer `G = (V, E, w, m)` with positive vertex and edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublyWeightedGraph {
    vertex_weights: Vec<f64>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<Incidence>>,
}

impl DoublyWeightedGraph {
    /// Validates and builds a layer. `edge_weights[k]` belongs to `edges[k]`;
    /// edges are stored sorted by `(min, max)` endpoint afterwards.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        vertex_weights: &[f64],
        edge_weights: &[f64],
    ) -> Result<Self> {
        if vertex_weights.len() != n {
            return Err(GraphError::LengthMismatch(format!(
                "{} vertex weights for {n} vertices",
                vertex_weights.len()
            )));
        }
        if edge_weights.len() != edges.len() {
            return Err(GraphError::LengthMismatch(format!(
                "{} edge weights for {} edges",
                edge_weights.len(),
                edges.len()
            )));
        }
        for (v, &m) in vertex_weights.iter().enumerate() {
            check_weight(m, || format!("vertex {v}"))?;
        }
        for (&(a, b), &w) in edges.iter().zip(edge_weights) {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::IndexOutOfRange { vertex: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            check_weight(w, || format!("edge ({a}, {b})"))?;
        }
        let (sorted, adjacency) = index_edges(
            n,
            edges.iter().zip(edge_weights).map(|(&(a, b), &w)| (a, b, w)),
        )?;
        Ok(DoublyWeightedGraph {
            vertex_weights: vertex_weights.to_vec(),
            edges: sorted
                .into_iter()
                .map(|(u, v, weight)| Edge { u, v, weight })
                .collect(),
            adjacency,
        })
    }

    /// All vertex and edge weights equal to one.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges, &vec![1.0; n], &vec![1.0; edges.len()])
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(Edge::key).collect()
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn edge_weights(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    pub fn vertex_weight(&self, v: usize) -> f64 {
        self.vertex_weights[v]
    }

    pub fn incident(&self, v: usize) -> &[Incidence] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|inc| inc.neighbor)
    }

    /// Index of the edge joining `a` and `b`, in either order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        if a >= self.vertex_count() || b >= self.vertex_count() {
            return None;
        }
        find_incidence(&self.adjacency[a], b)
    }

    pub fn require_edge(&self, a: usize, b: usize) -> Result<usize> {
        self.edge_index(a, b)
            .ok_or_else(|| GraphError::EdgeNotFound(format!("({a}, {b})")))
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_index(a, b).map(|idx| self.edges[idx].weight)
    }

    /// Same topology and vertex weights, new edge weights in stored edge order.
    pub fn with_edge_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(GraphError::LengthMismatch(format!(
                "{} edge weights for {} edges",
                weights.len(),
                self.edges.len()
            )));
        }
        let mut out = self.clone();
        for (edge, &w) in out.edges.iter_mut().zip(weights) {
            check_weight(w, || format!("edge ({}, {})", edge.u, edge.v))?;
            edge.weight = w;
        }
        Ok(out)
    }

    pub fn with_vertex_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.vertex_count() {
            return Err(GraphError::LengthMismatch(format!(
                "{} vertex weights for {} vertices",
                weights.len(),
                self.vertex_count()
            )));
        }
        for (v, &m) in weights.iter().enumerate() {
            check_weight(m, || format!("vertex {v}"))?;
        }
        let mut out = self.clone();
        out.vertex_weights = weights.to_vec();
        Ok(out)
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.vertex_count();
        if perm.len() != n {
            return Err(GraphError::LengthMismatch(format!(
                "permutation of length {} for {n} vertices",
                perm.len()
            )));
        }
        let mut m = vec![0.0; n];
        for (v, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(GraphError::IndexOutOfRange { vertex: p, n });
            }
            m[p] = self.vertex_weights[v];
        }
        let pairs: Vec<_> = self.edges.iter().map(|e| (perm[e.u], perm[e.v])).collect();
        Self::new(n, &pairs, &m, &self.edge_weights())
    }
}

/// Which part of `E_M` an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Intra,
    Inter,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Intra => "intra",
            EdgeKind::Inter => "inter",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplexEdge {
    pub a: StateVertex,
    pub b: StateVertex,
    pub weight: f64,
}

impl MultiplexEdge {
    pub fn kind(&self) -> EdgeKind {
        if self.a.layer == self.b.layer {
            EdgeKind::Intra
        } else {
            EdgeKind::Inter
        }
    }
}

impl fmt::Display for MultiplexEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// An explicit inter-layer edge `(x^la, x^lb)`; layers are zero-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterEdge {
    pub vertex: usize,
    pub layer_a: usize,
    pub layer_b: usize,
    pub weight: f64,
}

/// A doubly-weighted multiplex graph over `n` state vertices and `L` layers.
///
/// State vertex `x^i` is stored at index `i * n + x`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplexGraph {
    n: usize,
    layers: usize,
    vertex_weights: Vec<f64>,
    edges: Vec<MultiplexEdge>,
    adjacency: Vec<Vec<Incidence>>,
}

impl MultiplexGraph {
    /// `vertex_weights[i][x]` is `m(x^i)`; `intra_edges[i]` lists `(x, y, w)`
    /// for layer `i`.
    pub fn new(
        n: usize,
        vertex_weights: &[Vec<f64>],
        intra_edges: &[Vec<(usize, usize, f64)>],
        inter_edges: &[InterEdge],
    ) -> Result<Self> {
        let layers = vertex_weights.len();
        if layers == 0 {
            return Err(GraphError::EmptyLayerList);
        }
        if intra_edges.len() != layers {
            return Err(GraphError::LengthMismatch(format!(
                "{} intra-layer edge lists for {layers} layers",
                intra_edges.len()
            )));
        }
        let mut flat_weights = Vec::with_capacity(n * layers);
        for (i, row) in vertex_weights.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::MismatchedVertexCounts(n, row.len()));
            }
            for (x, &m) in row.iter().enumerate() {
                check_weight(m, || format!("vertex {}", StateVertex::new(x, i)))?;
            }
            flat_weights.extend_from_slice(row);
        }

        let mut raw = Vec::new();
        for (i, list) in intra_edges.iter().enumerate() {
            for &(x, y, w) in list {
                for v in [x, y] {
                    if v >= n {
                        return Err(GraphError::IndexOutOfRange { vertex: v, n });
                    }
                }
                if x == y {
                    return Err(GraphError::SelfLoop(x));
                }
                check_weight(w, || {
                    format!("edge ({}, {})", StateVertex::new(x, i), StateVertex::new(y, i))
                })?;
                raw.push((i * n + x, i * n + y, w));
            }
        }
        for e in inter_edges {
            if e.vertex >= n {
                return Err(GraphError::IndexOutOfRange { vertex: e.vertex, n });
            }
            for l in [e.layer_a, e.layer_b] {
                if l >= layers {
                    return Err(GraphError::LayerOutOfRange {
                        layer: l + 1,
                        layers,
                    });
                }
            }
            let describe = || {
                format!(
                    "({}, {})",
                    StateVertex::new(e.vertex, e.layer_a),
                    StateVertex::new(e.vertex, e.layer_b)
                )
            };
            if e.layer_a == e.layer_b {
                return Err(GraphError::InvalidInterEdge(describe()));
            }
            check_weight(e.weight, || format!("edge {}", describe()))?;
            raw.push((e.layer_a * n + e.vertex, e.layer_b * n + e.vertex, e.weight));
        }

        let (sorted, adjacency) = index_edges(n * layers, raw).map_err(|err| match err {
            GraphError::DuplicateEdge(a, b) => GraphError::DuplicateEdge(a % n, b % n),
            other => other,
        })?;
        let state = |idx: usize| StateVertex::new(idx % n, idx / n);
        let edges = sorted
            .into_iter()
            .map(|(a, b, weight)| MultiplexEdge {
                a: state(a),
                b: state(b),
                weight,
            })
            .collect();
        Ok(MultiplexGraph {
            n,
            layers,
            vertex_weights: flat_weights,
            edges,
            adjacency,
        })
    }

    /// The monolayer multiplex graph (`L = 1`, no inter-layer edges).
    pub fn monolayer(g: &DoublyWeightedGraph) -> Self {
        let intra: Vec<_> = g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect();
        MultiplexGraph::new(
            g.vertex_count(),
            &[g.vertex_weights().to_vec()],
            &[intra],
            &[],
        )
        .expect("a validated layer is a valid monolayer multiplex graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn layer_count(&self) -> usize {
        self.layers
    }

    pub fn state_count(&self) -> usize {
        self.n * self.layers
    }

    pub fn index_of(&self, x: StateVertex) -> usize {
        x.layer.index() * self.n + x.vertex
    }

    pub fn state(&self, idx: usize) -> StateVertex {
        StateVertex::new(idx % self.n, idx / self.n)
    }

    pub fn check_state(&self, x: StateVertex) -> Result<()> {
        if x.vertex >= self.n {
            return Err(GraphError::IndexOutOfRange {
                vertex: x.vertex,
                n: self.n,
            });
        }
        if x.layer.number() > self.layers {
            return Err(GraphError::LayerOutOfRange {
                layer: x.layer.number(),
                layers: self.layers,
            });
        }
        Ok(())
    }

    pub fn vertex_weight(&self, x: StateVertex) -> f64 {
        self.vertex_weights[self.index_of(x)]
    }

    pub fn edges(&self) -> &[MultiplexEdge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &MultiplexEdge {
        &self.edges[idx]
    }

    pub fn incident(&self, x: StateVertex) -> &[Incidence] {
        &self.adjacency[self.index_of(x)]
    }

    pub fn edge_index(&self, a: StateVertex, b: StateVertex) -> Option<usize> {
        if self.check_state(a).is_err() || self.check_state(b).is_err() {
            return None;
        }
        find_incidence(&self.adjacency[self.index_of(a)], self.index_of(b))
    }

    pub fn require_edge(&self, a: StateVertex, b: StateVertex) -> Result<usize> {
        self.edge_index(a, b)
            .ok_or_else(|| GraphError::EdgeNotFound(format!("({a}, {b})")))
    }

    pub fn edge_weight(&self, a: StateVertex, b: StateVertex) -> Option<f64> {
        self.edge_index(a, b).map(|idx| self.edges[idx].weight)
    }

    /// Intra-layer neighbors `Γ_A(x^i)` with the connecting edge weight.
    pub fn intra_neighbors(&self, x: StateVertex) -> impl Iterator<Item = (StateVertex, f64)> + '_ {
        self.incident(x).iter().filter_map(move |inc| {
            let y = self.state(inc.neighbor);
            (y.layer == x.layer).then(|| (y, self.edges[inc.edge].weight))
        })
    }

    /// Inter-layer neighbors `Γ_C(x^i)` with the connecting edge weight.
    pub fn inter_neighbors(&self, x: StateVertex) -> impl Iterator<Item = (StateVertex, f64)> + '_ {
        self.incident(x).iter().filter_map(move |inc| {
            let y = self.state(inc.neighbor);
            (y.layer != x.layer).then(|| (y, self.edges[inc.edge].weight))
        })
    }

    /// `W(x^i)`: the inverse of `Σ 1/√w` over intra-layer incident edges,
    /// or zero when `x^i` has no intra-layer neighbor.
    pub fn big_w(&self, x: StateVertex) -> Result<f64> {
        self.check_state(x)?;
        let sum: f64 = self.intra_neighbors(x).map(|(_, w)| w.sqrt().recip()).sum();
        Ok(if sum > 0.0 { sum.recip() } else { 0.0 })
    }

    /// Weighted degree over the full neighborhood `Γ_A ∪ Γ_C`.
    pub fn weighted_degree(&self, x: StateVertex) -> Result<f64> {
        self.check_state(x)?;
        Ok(self
            .incident(x)
            .iter()
            .map(|inc| self.edges[inc.edge].weight)
            .sum())
    }

    /// The intra-layer part of layer `layer_index` as a standalone graph.
    pub fn layer_graph(&self, layer_index: usize) -> Result<DoublyWeightedGraph> {
        if layer_index >= self.layers {
            return Err(GraphError::LayerOutOfRange {
                layer: layer_index + 1,
                layers: self.layers,
            });
        }
        let lo = layer_index * self.n;
        let m = &self.vertex_weights[lo..lo + self.n];
        let (pairs, weights): (Vec<_>, Vec<_>) = self
            .edges
            .iter()
            .filter(|e| e.kind() == EdgeKind::Intra && e.a.layer.index() == layer_index)
            .map(|e| ((e.a.vertex, e.b.vertex), e.weight))
            .unzip();
        DoublyWeightedGraph::new(self.n, &pairs, m, &weights)
    }

    pub fn inter_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.kind() == EdgeKind::Inter).count()
    }
}

/// A multiplex graph built from a stack of layers, with inter-layer weights
/// `min{W²(x^i), W²(x^j)}` between every pair of copies of each vertex.
///
/// Copies with `W(x^i) = 0` (isolated inside their layer) are degenerate:
/// they receive no inter-layer edges and are flagged instead.
#[derive(Clone, Debug, PartialEq)]
pub struct CompileGraph {
    graph: MultiplexGraph,
    sources: Vec<DoublyWeightedGraph>,
    w_values: Vec<f64>,
}

impl CompileGraph {
    pub fn compile(layers: &[DoublyWeightedGraph]) -> Result<Self> {
        let first = layers.first().ok_or(GraphError::EmptyLayerList)?;
        let n = first.vertex_count();
        if let Some(bad) = layers.iter().find(|g| g.vertex_count() != n) {
            return Err(GraphError::MismatchedVertexCounts(n, bad.vertex_count()));
        }
        let w_values: Vec<f64> = layers
            .iter()
            .flat_map(|g| (0..n).map(move |x| layer_big_w(g, x)))
            .collect();

        let mut inter = Vec::new();
        for x in 0..n {
            for i in 0..layers.len() {
                for j in i + 1..layers.len() {
                    let (wi, wj) = (w_values[i * n + x], w_values[j * n + x]);
                    if wi > 0.0 && wj > 0.0 {
                        inter.push(InterEdge {
                            vertex: x,
                            layer_a: i,
                            layer_b: j,
                            weight: (wi * wi).min(wj * wj),
                        });
                    }
                }
            }
        }
        let vertex_weights: Vec<Vec<f64>> =
            layers.iter().map(|g| g.vertex_weights().to_vec()).collect();
        let intra: Vec<Vec<(usize, usize, f64)>> = layers
            .iter()
            .map(|g| g.edges().iter().map(|e| (e.u, e.v, e.weight)).collect())
            .collect();
        let graph = MultiplexGraph::new(n, &vertex_weights, &intra, &inter)?;
        Ok(CompileGraph {
            graph,
            sources: layers.to_vec(),
            w_values,
        })
    }

    pub fn graph(&self) -> &MultiplexGraph {
        &self.graph
    }

    pub fn sources(&self) -> &[DoublyWeightedGraph] {
        &self.sources
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn layer_count(&self) -> usize {
        self.graph.layer_count()
    }

    /// Cached `W(x^i)`.
    pub fn big_w(&self, x: StateVertex) -> f64 {
        self.w_values[self.graph.index_of(x)]
    }

    /// `W(x^1), …, W(x^L)` for one vertex.
    pub fn w_profile(&self, vertex: usize) -> Vec<f64> {
        let n = self.vertex_count();
        (0..self.layer_count())
            .map(|i| self.w_values[i * n + vertex])
            .collect()
    }

    pub fn m_profile(&self, vertex: usize) -> Vec<f64> {
        (0..self.layer_count())
            .map(|i| self.graph.vertex_weight(StateVertex::new(vertex, i)))
            .collect()
    }

    pub fn is_degenerate(&self, x: StateVertex) -> bool {
        self.big_w(x) == 0.0
    }

    pub fn degenerate_states(&self) -> Vec<StateVertex> {
        (0..self.graph.state_count())
            .filter(|&idx| self.w_values[idx] == 0.0)
            .map(|idx| self.graph.state(idx))
            .collect()
    }

    /// Same layer stack with every vertex weight multiplied by `factor`.
    pub fn scale_vertex_weights(&self, factor: f64) -> Result<Self> {
        let layers = self
            .sources
            .iter()
            .map(|g| {
                let m: Vec<f64> = g.vertex_weights().iter().map(|m| m * factor).collect();
                g.with_vertex_weights(&m)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::compile(&layers)
    }
}

fn layer_big_w(g: &DoublyWeightedGraph, x: usize) -> f64 {
    let sum: f64 = g
        .incident(x)
        .iter()
        .map(|inc| g.edge(inc.edge).weight.sqrt().recip())
        .sum();
    if sum > 0.0 {
        sum.recip()
    } else {
        0.0
    }
}
