//! Labelled synthetic datasets for graph classification.
//!
//! Every sample carries its unweighted skeleton (for the structural and WL
//! features) and a compile graph (for the CE features). Samples are drawn in
//! parallel from per-sample seeds taken off one master stream, so results do
//! not depend on the thread count.

use std::collections::BTreeSet;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;

use crate::error::{GraphError, Result};
use crate::features::{ce_stat_features, traditional_features, wl_features, FeatureMatrix, FeatureRow, WlDictionary};
use crate::generators::{gnp_edges, karate_club, rng_from_seed, WeightRange};
use crate::graph::{CompileGraph, DoublyWeightedGraph};

#[derive(Clone, Debug)]
pub struct LabeledSample {
    pub id: String,
    pub label: String,
    pub skeleton: DoublyWeightedGraph,
    pub compile: CompileGraph,
}

/// Two-community graphs against degree-preserving rewirings of them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BridgeDatasetConfig {
    /// Total vertex count, split evenly between the two communities.
    pub n: usize,
    pub p_in: f64,
    pub bridges: usize,
    /// Successful double-edge swaps applied to produce a class-B graph.
    pub rewires: usize,
    pub count: usize,
    pub seed: u64,
}

impl Default for BridgeDatasetConfig {
    fn default() -> Self {
        BridgeDatasetConfig {
            n: 30,
            p_in: 0.3,
            bridges: 1,
            rewires: 40,
            count: 300,
            seed: 0,
        }
    }
}

impl BridgeDatasetConfig {
    fn validate(&self) -> Result<()> {
        if self.count % 2 != 0 {
            return Err(GraphError::InvalidSpec(format!("count must be even, got {}", self.count)));
        }
        if self.n < 4 || self.n % 2 != 0 {
            return Err(GraphError::InvalidSpec(format!("n must be even and at least 4, got {}", self.n)));
        }
        if !(0.0..=1.0).contains(&self.p_in) {
            return Err(GraphError::InvalidSpec(format!("p_in must lie in [0, 1], got {}", self.p_in)));
        }
        let half = self.n / 2;
        if self.bridges > half * half {
            return Err(GraphError::InvalidSpec(format!("at most {} bridges fit", half * half)));
        }
        Ok(())
    }
}

/// Two `G(n/2, p_in)` blocks joined by `bridges` distinct cross edges.
pub fn two_community_edges(n: usize, p_in: f64, bridges: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let half = n / 2;
    let mut edges = gnp_edges(half, p_in, rng);
    edges.extend(gnp_edges(half, p_in, rng).into_iter().map(|(u, v)| (u + half, v + half)));
    let mut cross = BTreeSet::new();
    while cross.len() < bridges {
        cross.insert((rng.random_range(0..half), rng.random_range(half..n)));
    }
    edges.extend(cross);
    edges.sort_unstable();
    edges
}

/// Double-edge swaps `(a,b),(c,d) → (a,d),(c,b)` that keep the graph simple.
/// Stops after `swaps` successes or `100 · swaps` attempts; returns the
/// number of swaps made. Degrees are preserved exactly.
pub fn rewire_degree_preserving(edges: &mut Vec<(usize, usize)>, swaps: usize, rng: &mut impl Rng) -> usize {
    let mut present: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut done = 0;
    let mut attempts = 0;
    while done < swaps && attempts < 100 * swaps.max(1) && edges.len() >= 2 {
        attempts += 1;
        let i = rng.random_range(0..edges.len());
        let j = rng.random_range(0..edges.len());
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.random::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || a == c || b == d {
            continue;
        }
        let (e1, e2) = (key(a, d), key(c, b));
        if present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&edges[i]);
        present.remove(&edges[j]);
        present.insert(e1);
        present.insert(e2);
        edges[i] = e1;
        edges[j] = e2;
        done += 1;
    }
    edges.sort_unstable();
    done
}

/// Lifts a skeleton to three layers on the same vertex set:
/// unit weights; edge weight `1 + #common neighbours`; weights drawn from
/// the default ranges. The lift makes `W` differ across layers exactly where
/// local clustering differs from the degree profile.
pub fn lift_to_compile(skeleton: &DoublyWeightedGraph, rng: &mut impl Rng) -> Result<CompileGraph> {
    let n = skeleton.vertex_count();
    let pairs = skeleton.edge_pairs();
    let unit = DoublyWeightedGraph::unweighted(n, &pairs)?;
    let embedded: Vec<f64> = pairs
        .iter()
        .map(|&(u, v)| {
            let common = skeleton.neighbors(u).filter(|&z| skeleton.edge_index(v, z).is_some()).count();
            1.0 + common as f64
        })
        .collect();
    let embedded = unit.with_edge_weights(&embedded)?;
    let m = WeightRange::DEFAULT_VERTEX.sample_n(rng, n);
    let w = WeightRange::DEFAULT_EDGE.sample_n(rng, pairs.len());
    let random = DoublyWeightedGraph::new(n, &pairs, &m, &w)?;
    CompileGraph::compile(&[unit, embedded, random])
}

fn sample_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = rng_from_seed(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

/// Balanced dataset: samples alternate between class `A` (bridged
/// communities) and class `B` (the same draw after rewiring).
pub fn bridge_dataset(cfg: &BridgeDatasetConfig) -> Result<Vec<LabeledSample>> {
    cfg.validate()?;
    sample_seeds(cfg.seed, cfg.count)
        .into_par_iter()
        .enumerate()
        .map(|(idx, seed)| {
            let mut rng = rng_from_seed(seed);
            let mut edges = two_community_edges(cfg.n, cfg.p_in, cfg.bridges, &mut rng);
            let label = if idx % 2 == 0 { "A" } else { "B" };
            if label == "B" {
                rewire_degree_preserving(&mut edges, cfg.rewires, &mut rng);
            }
            let skeleton = DoublyWeightedGraph::unweighted(cfg.n, &edges)?;
            let compile = lift_to_compile(&skeleton, &mut rng)?;
            Ok(LabeledSample {
                id: format!("g{idx:04}"),
                label: label.into(),
                skeleton,
                compile,
            })
        })
        .collect()
}

/// Karate-club samples whose three layers have edge weights multiplied by
/// lognormal noise of scale `0, σ_c, 2σ_c` for class `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct KaratePerturbationConfig {
    pub sigmas: Vec<f64>,
    pub per_class: usize,
    pub seed: u64,
}

impl Default for KaratePerturbationConfig {
    fn default() -> Self {
        KaratePerturbationConfig {
            sigmas: vec![0.1, 0.5, 1.0],
            per_class: 50,
            seed: 0,
        }
    }
}

pub fn karate_perturbation_dataset(cfg: &KaratePerturbationConfig) -> Result<Vec<LabeledSample>> {
    if cfg.sigmas.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(GraphError::InvalidSpec("noise scales must be finite and non-negative".into()));
    }
    let base = karate_club();
    let total = cfg.sigmas.len() * cfg.per_class;
    sample_seeds(cfg.seed, total)
        .into_par_iter()
        .enumerate()
        .map(|(idx, seed)| {
            let class = idx % cfg.sigmas.len();
            let sigma = cfg.sigmas[class];
            let mut rng = rng_from_seed(seed);
            let m = WeightRange::DEFAULT_VERTEX.sample_n(&mut rng, base.vertex_count());
            let w0 = WeightRange::DEFAULT_EDGE.sample_n(&mut rng, base.edge_count());
            let layers = (0..3)
                .map(|l| {
                    let noise = LogNormal::new(0.0, sigma * l as f64)
                        .map_err(|e| GraphError::InvalidSpec(e.to_string()))?;
                    let w: Vec<f64> = w0.iter().map(|w| w * noise.sample(&mut rng)).collect();
                    base.with_vertex_weights(&m)?.with_edge_weights(&w)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LabeledSample {
                id: format!("k{idx:04}"),
                label: class.to_string(),
                skeleton: base.clone(),
                compile: CompileGraph::compile(&layers)?,
            })
        })
        .collect()
}

/// CE and structural features in parallel; WL labels are interned serially
/// in sample order through one shared dictionary.
pub fn feature_matrix(samples: &[LabeledSample], wl_iterations: usize) -> FeatureMatrix {
    let numeric: Vec<_> = samples
        .par_iter()
        .map(|s| (ce_stat_features(&s.compile), traditional_features(&s.skeleton)))
        .collect();
    let mut dict = WlDictionary::new();
    let rows = samples
        .iter()
        .zip(numeric)
        .map(|(s, (ce_stats, trad_stats))| FeatureRow {
            graph_id: s.id.clone(),
            label: s.label.clone(),
            ce_stats,
            trad_stats,
            wl: wl_features(&s.skeleton, wl_iterations, &mut dict),
        })
        .collect();
    FeatureMatrix { rows }
}
