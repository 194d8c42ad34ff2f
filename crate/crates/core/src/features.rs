//! Graph-level feature vectors: CE statistics, classical structural metrics
//! and Weisfeiler–Lehman subtree histograms.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::evaluation::comprehensive_evaluation;
use crate::graph::{CompileGraph, DoublyWeightedGraph};
use crate::stats;

pub const CE_STAT_COUNT: usize = 12;
pub const TRAD_STAT_COUNT: usize = 6;
pub const DEFAULT_WL_ITERATIONS: usize = 3;

pub const CE_STAT_NAMES: [&str; CE_STAT_COUNT] = [
    "mean",
    "std",
    "min",
    "max",
    "median",
    "q1",
    "q3",
    "iqr",
    "skewness",
    "excess_kurtosis",
    "fraction_negative",
    "sum",
];

/// Summary of a sample in [`CE_STAT_NAMES`] order. Computed on the sorted
/// sample, so the result does not depend on input order.
pub fn distribution_stats(values: &[f64]) -> [f64; CE_STAT_COUNT] {
    let s = stats::sorted(values);
    if s.is_empty() {
        return [0.0; CE_STAT_COUNT];
    }
    let q1 = stats::quantile_sorted(&s, 0.25);
    let q3 = stats::quantile_sorted(&s, 0.75);
    let negative = s.iter().filter(|&&v| v < 0.0).count() as f64 / s.len() as f64;
    [
        stats::mean(&s),
        stats::std_dev(&s),
        s[0],
        s[s.len() - 1],
        stats::quantile_sorted(&s, 0.5),
        q1,
        q3,
        q3 - q1,
        stats::skewness(&s),
        stats::excess_kurtosis(&s),
        negative,
        s.iter().sum(),
    ]
}

pub fn ce_values(cg: &CompileGraph) -> Vec<f64> {
    (0..cg.vertex_count())
        .map(|x| comprehensive_evaluation(cg, x).expect("vertex ids come from the graph"))
        .collect()
}

/// The 12 statistics of the per-vertex CE distribution. A single-layer graph
/// has CE ≡ 0 and yields the statistics of a constant sample.
pub fn ce_stat_features(cg: &CompileGraph) -> [f64; CE_STAT_COUNT] {
    distribution_stats(&ce_values(cg))
}

/// Local clustering coefficient on the unweighted skeleton; 0 below degree 2.
pub fn clustering_coefficients(g: &DoublyWeightedGraph) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|v| {
            let nbrs: Vec<usize> = g.neighbors(v).collect();
            let k = nbrs.len();
            if k < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if g.edge_index(a, b).is_some() {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Unnormalized shortest-path betweenness on the unweighted skeleton
/// (Brandes), counting each unordered pair once. Unreachable pairs
/// contribute nothing.
pub fn betweenness_centrality(g: &DoublyWeightedGraph) -> Vec<f64> {
    let n = g.vertex_count();
    let partial: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut order = Vec::with_capacity(n);
            let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut sigma = vec![0.0f64; n];
            let mut dist = vec![usize::MAX; n];
            sigma[s] = 1.0;
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for w in g.neighbors(v) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                        preds[w].push(v);
                    }
                }
            }
            let mut delta = vec![0.0f64; n];
            for &w in order.iter().rev() {
                for &v in &preds[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            delta[s] = 0.0;
            delta
        })
        .collect();
    let mut bc = vec![0.0; n];
    for delta in &partial {
        for (b, d) in bc.iter_mut().zip(delta) {
            *b += d;
        }
    }
    bc.iter().map(|b| b / 2.0).collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let s = stats::sorted(values);
    (stats::mean(&s), stats::std_dev(&s))
}

/// `(mean, std)` of degree, clustering coefficient and betweenness, in that
/// order.
pub fn traditional_features(g: &DoublyWeightedGraph) -> [f64; TRAD_STAT_COUNT] {
    let degree: Vec<f64> = (0..g.vertex_count()).map(|v| g.degree(v) as f64).collect();
    let (d0, d1) = mean_std(&degree);
    let (c0, c1) = mean_std(&clustering_coefficients(g));
    let (b0, b1) = mean_std(&betweenness_centrality(g));
    [d0, d1, c0, c1, b0, b1]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum WlKey {
    Degree(usize),
    Refined(u32, Vec<u32>),
}

/// Injective map from WL signatures to compact labels. Labels are handed
/// out in first-seen order, so sharing one dictionary across a dataset and
/// feeding graphs in a fixed order gives reproducible columns.
#[derive(Clone, Debug, Default)]
pub struct WlDictionary {
    ids: HashMap<WlKey, u32>,
}

impl WlDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn intern(&mut self, key: WlKey) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }

    /// Label assigned to the iteration-0 class of vertices with this degree.
    pub fn degree_label(&self, degree: usize) -> Option<u32> {
        self.ids.get(&WlKey::Degree(degree)).copied()
    }
}

pub type WlHistogram = BTreeMap<u32, usize>;

/// Per-iteration vertex labels, `iterations + 1` rounds.
pub fn wl_labels(g: &DoublyWeightedGraph, iterations: usize, dict: &mut WlDictionary) -> Vec<Vec<u32>> {
    let n = g.vertex_count();
    let mut rounds = Vec::with_capacity(iterations + 1);
    rounds.push(
        (0..n)
            .map(|v| dict.intern(WlKey::Degree(g.degree(v))))
            .collect::<Vec<_>>(),
    );
    for _ in 0..iterations {
        let prev = rounds.last().unwrap();
        let next: Vec<u32> = (0..n)
            .map(|v| {
                let mut nbr: Vec<u32> = g.neighbors(v).map(|u| prev[u]).collect();
                nbr.sort_unstable();
                dict.intern(WlKey::Refined(prev[v], nbr))
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

/// Label counts pooled over all `iterations + 1` rounds.
pub fn wl_features(g: &DoublyWeightedGraph, iterations: usize, dict: &mut WlDictionary) -> WlHistogram {
    let mut hist = WlHistogram::new();
    for label in wl_labels(g, iterations, dict).into_iter().flatten() {
        *hist.entry(label).or_default() += 1;
    }
    hist
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureRow {
    pub graph_id: String,
    pub label: String,
    pub ce_stats: [f64; CE_STAT_COUNT],
    pub trad_stats: [f64; TRAD_STAT_COUNT],
    pub wl: WlHistogram,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureRow>,
}

impl FeatureMatrix {
    /// Every WL label that occurs in some row, ascending.
    pub fn wl_columns(&self) -> Vec<u32> {
        let mut cols: Vec<u32> = self.rows.iter().flat_map(|r| r.wl.keys().copied()).collect();
        cols.sort_unstable();
        cols.dedup();
        cols
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["graphId".to_string(), "label".to_string()];
        h.extend((0..CE_STAT_COUNT).map(|i| format!("CE_stat_{i}")));
        h.extend((0..TRAD_STAT_COUNT).map(|i| format!("TRAD_stat_{i}")));
        h.extend(self.wl_columns().iter().map(|l| format!("wl_{l}")));
        h
    }

    /// Dense CSV; absent WL labels are written as 0.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        let cols = self.wl_columns();
        for row in &self.rows {
            let mut rec = vec![row.graph_id.clone(), row.label.clone()];
            rec.extend(row.ce_stats.iter().map(|v| v.to_string()));
            rec.extend(row.trad_stats.iter().map(|v| v.to_string()));
            rec.extend(cols.iter().map(|l| row.wl.get(l).copied().unwrap_or(0).to_string()));
            w.write_record(rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{build_compile_experiment, cg258_specs, complete, cycle, karate_club, star, erdos_renyi_unweighted};
    use proptest::prelude::*;

    fn two_triangles() -> DoublyWeightedGraph {
        DoublyWeightedGraph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn constant_sample_stats() {
        let s = distribution_stats(&[-2.5; 7]);
        assert_eq!(s[0], -2.5);
        assert_eq!((s[1], s[7], s[8], s[9]), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(s[10], 1.0);
        assert_eq!(s[11], -17.5);
    }

    #[test]
    fn identical_layers_are_all_negative() {
        // every copy pair contributes -(L - 2)(m_i + m_j) < 0 when L = 3
        let g = erdos_renyi_unweighted(12, 0.5, 3);
        let cg = CompileGraph::compile(&[g.clone(), g.clone(), g.clone()]).unwrap();
        let live = (0..12).filter(|&v| g.degree(v) > 0).count() as f64;
        assert_eq!(ce_stat_features(&cg)[10], live / 12.0);
    }

    #[test]
    fn ce_stats_on_seeded_experiment() {
        let cg = build_compile_experiment(&cg258_specs(), 7).unwrap();
        let a = ce_stat_features(&cg);
        assert!(a.iter().all(|v| v.is_finite()));
        assert_eq!(a, ce_stat_features(&build_compile_experiment(&cg258_specs(), 7).unwrap()));
    }

    #[test]
    fn traditional_identities() {
        let k4 = traditional_features(&complete(4));
        assert_eq!((k4[0], k4[1], k4[2], k4[4], k4[5]), (3.0, 0.0, 1.0, 0.0, 0.0));

        assert_eq!(betweenness_centrality(&star(5)), vec![10.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(betweenness_centrality(&cycle(5)), vec![1.0; 5]);

        let k = traditional_features(&karate_club());
        assert!(k.iter().all(|v| v.is_finite()));
        assert!((k[0] - 2.0 * 78.0 / 34.0).abs() < 1e-12);
    }

    #[test]
    fn betweenness_per_component() {
        // path 0-1-2 and a disjoint edge 3-4
        let g = DoublyWeightedGraph::unweighted(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(betweenness_centrality(&g), vec![0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn wl_base_case_is_degree_histogram() {
        let mut dict = WlDictionary::new();
        let g = star(4);
        let h = wl_features(&g, 0, &mut dict);
        assert_eq!(h.len(), 2);
        assert_eq!(h[&dict.degree_label(4).unwrap()], 1);
        assert_eq!(h[&dict.degree_label(1).unwrap()], 4);
    }

    #[test]
    fn wl_blind_spot() {
        let mut dict = WlDictionary::new();
        for it in 0..6 {
            assert_eq!(
                wl_features(&cycle(6), it, &mut dict),
                wl_features(&two_triangles(), it, &mut dict)
            );
        }
        let c6 = cycle(6);
        let tt = two_triangles();
        let weights = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let lift = |g: &DoublyWeightedGraph| {
            CompileGraph::compile(&[g.clone(), g.with_edge_weights(&weights).unwrap()]).unwrap()
        };
        assert_ne!(ce_stat_features(&lift(&c6)), ce_stat_features(&lift(&tt)));
    }

    #[test]
    fn csv_layout() {
        let mut dict = WlDictionary::new();
        let rows = [("a", cycle(4)), ("b", star(3))]
            .into_iter()
            .map(|(id, g)| FeatureRow {
                graph_id: id.into(),
                label: "0".into(),
                ce_stats: ce_stat_features(&CompileGraph::compile(&[g.clone(), g.clone()]).unwrap()),
                trad_stats: traditional_features(&g),
                wl: wl_features(&g, 1, &mut dict),
            })
            .collect();
        let m = FeatureMatrix { rows };
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("graphId,label,CE_stat_0,"));
        assert!(header.contains("CE_stat_11,TRAD_stat_0,"));
        assert!(header.ends_with("TRAD_stat_5,wl_0,wl_1,wl_2,wl_3,wl_4,wl_5"));
        assert_eq!(text.lines().count(), 3);
    }

    fn relabel(g: &DoublyWeightedGraph, perm: &[usize]) -> DoublyWeightedGraph {
        g.permuted(perm).unwrap()
    }

    proptest! {
        #[test]
        fn features_are_permutation_invariant(
            seed in any::<u64>(),
            perm in Just((0..14).collect::<Vec<usize>>()).prop_shuffle(),
        ) {
            let g = erdos_renyi_unweighted(14, 0.35, seed);
            let h = relabel(&g, &perm);
            let (a, b) = (traditional_features(&g), traditional_features(&h));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
            let mut dict = WlDictionary::new();
            prop_assert_eq!(wl_features(&g, 3, &mut dict), wl_features(&h, 3, &mut dict));

            let w: Vec<f64> = (0..g.edge_count()).map(|i| 1.0 + (i % 5) as f64).collect();
            let gw = g.with_edge_weights(&w).unwrap();
            let hw = relabel(&gw, &perm);
            let cg = CompileGraph::compile(&[g.clone(), gw]).unwrap();
            let ch = CompileGraph::compile(&[h, hw]).unwrap();
            let (a, b) = (ce_stat_features(&cg), ce_stat_features(&ch));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
            }
        }
    }
}
