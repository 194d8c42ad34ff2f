//! Runs one command end to end: load or generate, normalize, compute, write.
//!
//! Normalization is applied per layer before anything else. Every failure is
//! mapped to an [`ErrorCategory`] with a fixed exit code.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::curvature::{compile_curvature_report, curvature_report, CurvatureReport};
use crate::dataset::{bridge_dataset, feature_matrix, karate_perturbation_dataset, BridgeDatasetConfig, KaratePerturbationConfig};
use crate::error::GraphError;
use crate::evaluation::{difference_scores, identify_weakness, EvaluationReport, WeaknessFinding};
use crate::features::{ce_stat_features, traditional_features, wl_features, FeatureMatrix, FeatureRow, WlDictionary};
use crate::generators::{build_compile_experiment, GeneratorSpec, GraphKind, WeightRange};
use crate::graph::{CompileGraph, DoublyWeightedGraph, MultiplexGraph};
use crate::io::{serialize_graph, DocumentGraph, GraphDocument, IoError};
use crate::normalization::NormalizationScheme;
use crate::sensitivity::{sensitivity_map, stability_summary, Parameter, SensitivityRecord, StabilityReport};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Curvature,
    Sensitivity,
    Evaluate,
    Identify,
    Generate,
    Features,
    Hist,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Curvature => "curvature",
            Command::Sensitivity => "sensitivity",
            Command::Evaluate => "evaluate",
            Command::Identify => "identify",
            Command::Generate => "generate",
            Command::Features => "features",
            Command::Hist => "hist",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DatasetKind {
    Bridge,
    Karate,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    /// One generator spec per layer.
    Generate(Vec<GraphKind>),
    /// A labelled dataset; only meaningful for `features`.
    Dataset { kind: DatasetKind, count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub input: InputSource,
    /// `None` leaves weights untouched.
    pub normalization: Option<NormalizationScheme>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub wl_iterations: usize,
    pub vertex_weights: WeightRange,
    pub edge_weights: WeightRange,
    pub bins: usize,
}

impl RunConfig {
    pub fn new(command: Command, input: InputSource, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input,
            normalization: Some(NormalizationScheme::DEFAULT_BOUNDED),
            seed: 0,
            out_dir: out_dir.into(),
            format: OutputFormat::Csv,
            wl_iterations: crate::features::DEFAULT_WL_ITERATIONS,
            vertex_weights: WeightRange::DEFAULT_VERTEX,
            edge_weights: WeightRange::DEFAULT_EDGE,
            bins: 20,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Io,
    Syntax,
    Validation,
    Computation,
}

impl ErrorCategory {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCategory::Usage => "usage",
            ErrorCategory::Io => "io",
            ErrorCategory::Syntax => "syntax",
            ErrorCategory::Validation => "validation",
            ErrorCategory::Computation => "computation",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Usage => 2,
            ErrorCategory::Io => 3,
            ErrorCategory::Syntax => 4,
            ErrorCategory::Validation => 5,
            ErrorCategory::Computation => 6,
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    File(#[from] IoError),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    #[error("{0}")]
    Computation(#[from] GraphError),
}

impl PipelineError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            PipelineError::Usage(_) => ErrorCategory::Usage,
            PipelineError::File(IoError::Io { .. }) | PipelineError::Output { .. } => ErrorCategory::Io,
            PipelineError::File(IoError::Syntax { .. }) => ErrorCategory::Syntax,
            PipelineError::File(IoError::Validation { .. }) => ErrorCategory::Validation,
            PipelineError::Computation(GraphError::InvalidSpec(_) | GraphError::InvalidRange { .. }) => {
                ErrorCategory::Usage
            }
            PipelineError::Computation(_) => ErrorCategory::Computation,
        }
    }

    /// One-line JSON for stderr.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.category().name(), "message": self.to_string() }).to_string()
    }
}

pub type PipelineResult<T> = Result<T, PipelineError>;

/// What a run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn load(cfg: &RunConfig) -> PipelineResult<GraphDocument> {
    match &cfg.input {
        InputSource::File(path) => Ok(crate::io::read_graph(path)?),
        InputSource::Generate(kinds) => {
            let specs: Vec<GeneratorSpec> = kinds
                .iter()
                .map(|&kind| GeneratorSpec::new(kind, 0).with_weights(cfg.vertex_weights, cfg.edge_weights))
                .collect();
            Ok(GraphDocument::compile(build_compile_experiment(&specs, cfg.seed)?))
        }
        InputSource::Dataset { .. } => Err(PipelineError::Usage(format!(
            "{} takes --input or --generate, not --dataset",
            cfg.command.name()
        ))),
    }
}

/// Applies the scheme to every layer; explicit inter-layer edges keep their
/// weights, compile graphs are recompiled.
fn normalize(doc: &GraphDocument, scheme: Option<NormalizationScheme>) -> PipelineResult<GraphDocument> {
    let Some(scheme) = scheme else {
        return Ok(doc.clone());
    };
    let layers = doc
        .layers()
        .iter()
        .map(|g| if g.edge_count() == 0 { Ok(g.clone()) } else { scheme.apply(g) })
        .collect::<Result<Vec<_>, _>>()?;
    let graph = match &doc.graph {
        DocumentGraph::Compile(_) => DocumentGraph::Compile(CompileGraph::compile(&layers)?),
        DocumentGraph::Multiplex(g) => {
            let m: Vec<Vec<f64>> = layers.iter().map(|l| l.vertex_weights().to_vec()).collect();
            let intra: Vec<Vec<_>> = layers
                .iter()
                .map(|l| l.edges().iter().map(|e| (e.u, e.v, e.weight)).collect())
                .collect();
            DocumentGraph::Multiplex(MultiplexGraph::new(g.vertex_count(), &m, &intra, &doc.inter_edges())?)
        }
    };
    Ok(GraphDocument {
        graph,
        labels: doc.labels.clone(),
    })
}

fn require_compile(doc: &GraphDocument, command: Command) -> PipelineResult<&CompileGraph> {
    doc.as_compile().ok_or_else(|| {
        PipelineError::File(IoError::Validation {
            element: "inter_edges".into(),
            reason: format!("{} needs a compile graph; drop the explicit inter_edges", command.name()),
        })
    })
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, contents: impl AsRef<[u8]>) -> PipelineResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| PipelineError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.files.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> PipelineResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
        text.push('\n');
        self.put(name, text)
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> PipelineResult<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| PipelineError::Output {
            path: name.to_string(),
            message: e.to_string(),
        };
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(row).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| PipelineError::Output {
            path: name.to_string(),
            message: e.to_string(),
        })?;
        self.put(name, bytes)
    }
}

fn num(x: f64) -> String {
    x.to_string()
}

pub fn run_pipeline(cfg: &RunConfig) -> PipelineResult<RunOutput> {
    fs::create_dir_all(&cfg.out_dir).map_err(|e| PipelineError::Output {
        path: cfg.out_dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut out = Writer {
        dir: &cfg.out_dir,
        files: Vec::new(),
    };
    let summary = match cfg.command {
        Command::Generate => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            out.put("graph.json", serialize_graph(&doc))?;
            let g = doc.multiplex();
            format!("{} vertices, {} layers, {} edges", g.vertex_count(), g.layer_count(), g.edges().len())
        }
        Command::Curvature => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            let report = match doc.as_compile() {
                Some(cg) => compile_curvature_report(cg),
                None => curvature_report(doc.multiplex()),
            };
            write_curvature(&mut out, cfg.format, &report)?;
            format!(
                "{} edges, curvature in [{}, {}]",
                report.summary.count, report.summary.min, report.summary.max
            )
        }
        Command::Sensitivity => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            let layers = doc.layers();
            let mut records = Vec::new();
            let mut stability = Vec::new();
            for g in &layers {
                records.push(sensitivity_map(g));
                stability.push(if g.edge_count() > 1 {
                    Some(stability_summary(g, (0.9, 1.1), 0.9, cfg.seed)?)
                } else {
                    None
                });
            }
            write_sensitivity(&mut out, cfg.format, &records, &stability)?;
            let total: usize = records.iter().map(Vec::len).sum();
            let undefined = records
                .iter()
                .flatten()
                .filter(|r| r.dimensionless.value().is_none())
                .count();
            format!("{total} sensitivities, {undefined} undefined")
        }
        Command::Evaluate => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            let report = difference_scores(require_compile(&doc, cfg.command)?);
            write_evaluation(&mut out, cfg.format, &report)?;
            format!("{} vertices, difference spread {}", report.rows.len(), report.spread())
        }
        Command::Identify => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            let finding = identify_weakness(require_compile(&doc, cfg.command)?)?;
            write_finding(&mut out, cfg.format, &finding)?;
            format!(
                "vertex {} layer {} edge ({}, {}){}",
                finding.vertex,
                finding.layer,
                finding.edge.0,
                finding.edge.1,
                if finding.low_confidence { " [low confidence]" } else { "" }
            )
        }
        Command::Features => {
            let matrix = features(cfg)?;
            match cfg.format {
                OutputFormat::Csv => {
                    let mut buf = Vec::new();
                    matrix.write_csv(&mut buf).map_err(|e| PipelineError::Output {
                        path: "features.csv".into(),
                        message: e.to_string(),
                    })?;
                    out.put("features.csv", buf)?;
                }
                OutputFormat::Json => out.json("features.json", &matrix)?,
            }
            format!("{} feature rows", matrix.rows.len())
        }
        Command::Hist => {
            let doc = load(cfg)?;
            let mut hists = Vec::new();
            let bounded = match cfg.normalization {
                Some(b @ NormalizationScheme::Bounded { .. }) => b,
                _ => NormalizationScheme::DEFAULT_BOUNDED,
            };
            for scheme in [NormalizationScheme::Mean, bounded] {
                let normalized = normalize(&doc, Some(scheme))?;
                let values: Vec<f64> = match normalized.as_compile() {
                    Some(cg) => compile_curvature_report(cg),
                    None => curvature_report(normalized.multiplex()),
                }
                .entries
                .iter()
                .map(|e| e.value)
                .collect();
                hists.push(histogram(scheme, &values, cfg.bins));
            }
            write_hist(&mut out, cfg.format, &hists)?;
            hists
                .iter()
                .map(|h| format!("{}: range {}", h.scheme, h.max - h.min))
                .collect::<Vec<_>>()
                .join("; ")
        }
    };
    Ok(RunOutput {
        files: out.files,
        summary,
    })
}

fn features(cfg: &RunConfig) -> PipelineResult<FeatureMatrix> {
    match cfg.input {
        InputSource::Dataset { kind, count } => {
            let samples = match kind {
                DatasetKind::Bridge => bridge_dataset(&BridgeDatasetConfig {
                    count,
                    seed: cfg.seed,
                    ..Default::default()
                })?,
                DatasetKind::Karate => {
                    let base = KaratePerturbationConfig::default();
                    let classes = base.sigmas.len();
                    if count % classes != 0 {
                        return Err(PipelineError::Usage(format!(
                            "karate dataset count must be a multiple of {classes}"
                        )));
                    }
                    karate_perturbation_dataset(&KaratePerturbationConfig {
                        per_class: count / classes,
                        seed: cfg.seed,
                        ..base
                    })?
                }
            };
            Ok(feature_matrix(&samples, cfg.wl_iterations))
        }
        _ => {
            let doc = normalize(&load(cfg)?, cfg.normalization)?;
            let cg = require_compile(&doc, cfg.command)?;
            let skeleton = union_skeleton(cg)?;
            let mut dict = WlDictionary::new();
            Ok(FeatureMatrix {
                rows: vec![FeatureRow {
                    graph_id: "g0000".into(),
                    label: String::new(),
                    ce_stats: ce_stat_features(cg),
                    trad_stats: traditional_features(&skeleton),
                    wl: wl_features(&skeleton, cfg.wl_iterations, &mut dict),
                }],
            })
        }
    }
}

/// Unweighted union of all layers' edges.
fn union_skeleton(cg: &CompileGraph) -> PipelineResult<DoublyWeightedGraph> {
    let mut pairs: Vec<(usize, usize)> = cg.sources().iter().flat_map(|g| g.edge_pairs()).collect();
    pairs.sort_unstable();
    pairs.dedup();
    Ok(DoublyWeightedGraph::unweighted(cg.vertex_count(), &pairs)?)
}

fn write_curvature(out: &mut Writer, format: OutputFormat, report: &CurvatureReport) -> PipelineResult<()> {
    match format {
        OutputFormat::Json => out.json("curvature.json", report),
        OutputFormat::Csv => {
            let rows = report
                .entries
                .iter()
                .map(|e| {
                    vec![
                        e.kind.to_string(),
                        e.a.vertex.to_string(),
                        e.a.layer.to_string(),
                        e.b.vertex.to_string(),
                        e.b.layer.to_string(),
                        num(e.value),
                        e.low_w_layer.map(|l| l.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            out.csv(
                "curvature.csv",
                &["kind", "u", "u_layer", "v", "v_layer", "curvature", "low_w_layer"],
                rows,
            )
        }
    }
}

#[derive(Serialize)]
struct LayerSensitivity<'a> {
    layer: usize,
    records: &'a [SensitivityRecord],
    stability: &'a Option<StabilityReport>,
}

fn write_sensitivity(
    out: &mut Writer,
    format: OutputFormat,
    records: &[Vec<SensitivityRecord>],
    stability: &[Option<StabilityReport>],
) -> PipelineResult<()> {
    match format {
        OutputFormat::Json => {
            let layers: Vec<_> = records
                .iter()
                .zip(stability)
                .enumerate()
                .map(|(i, (r, s))| LayerSensitivity {
                    layer: i + 1,
                    records: r,
                    stability: s,
                })
                .collect();
            out.json("sensitivity.json", &layers)
        }
        OutputFormat::Csv => {
            let mut rows = Vec::new();
            for (i, layer) in records.iter().enumerate() {
                for r in layer {
                    let (kind, a, b) = match r.parameter {
                        Parameter::VertexWeight(v) => ("m", v.to_string(), String::new()),
                        Parameter::EdgeWeight(a, b) => ("w", a.to_string(), b.to_string()),
                    };
                    rows.push(vec![
                        (i + 1).to_string(),
                        r.edge.0.to_string(),
                        r.edge.1.to_string(),
                        kind.to_string(),
                        a,
                        b,
                        num(r.curvature),
                        num(r.partial),
                        r.dimensionless.value().map(num).unwrap_or_default(),
                    ]);
                }
            }
            out.csv(
                "sensitivity.csv",
                &["layer", "u", "v", "parameter", "param_u", "param_v", "curvature", "partial", "sensitivity"],
                rows,
            )
        }
    }
}

fn evaluation_rows(report: &EvaluationReport) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.vertex.to_string(),
                num(r.ce),
                num(r.ce_uni),
                num(r.ce_uni_unscaled),
                num(r.difference),
                r.degenerate_layers.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(";"),
            ]
        })
        .collect()
}

const EVALUATION_HEADER: [&str; 6] = ["vertex", "ce", "ce_uni", "ce_uni_unscaled", "difference", "degenerate_layers"];

fn write_evaluation(out: &mut Writer, format: OutputFormat, report: &EvaluationReport) -> PipelineResult<()> {
    match format {
        OutputFormat::Json => out.json("evaluation.json", report),
        OutputFormat::Csv => out.csv("evaluation.csv", &EVALUATION_HEADER, evaluation_rows(report)),
    }
}

fn write_finding(out: &mut Writer, format: OutputFormat, f: &WeaknessFinding) -> PipelineResult<()> {
    match format {
        OutputFormat::Json => out.json("identify.json", f),
        OutputFormat::Csv => {
            out.csv(
                "identify.csv",
                &["vertex", "layer", "u", "v", "difference", "layer_sum", "curvature", "low_confidence"],
                vec![vec![
                    f.vertex.to_string(),
                    f.layer.to_string(),
                    f.edge.0.to_string(),
                    f.edge.1.to_string(),
                    num(f.difference),
                    num(f.layer_sum),
                    num(f.curvature),
                    f.low_confidence.to_string(),
                ]],
            )?;
            let ranking = EvaluationReport {
                rows: f.ranking.clone(),
            };
            out.csv("identify_ranking.csv", &EVALUATION_HEADER, evaluation_rows(&ranking))?;
            out.csv(
                "identify_layers.csv",
                &["layer", "sum", "edges", "isolated"],
                f.layer_sums
                    .iter()
                    .map(|s| vec![s.layer.to_string(), num(s.sum), s.edges.to_string(), s.isolated.to_string()])
                    .collect(),
            )?;
            out.csv(
                "identify_edges.csv",
                &["u", "v", "curvature"],
                f.edge_scores
                    .iter()
                    .map(|s| vec![s.edge.0.to_string(), s.edge.1.to_string(), num(s.curvature)])
                    .collect(),
            )
        }
    }
}

/// Curvature histogram under one normalization scheme.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub scheme: String,
    pub min: f64,
    pub max: f64,
    pub std: f64,
    /// `(lo, hi, count)`; the last bin is closed on the right.
    pub bins: Vec<(f64, f64, usize)>,
}

pub fn histogram(scheme: NormalizationScheme, values: &[f64], bins: usize) -> Histogram {
    let bins = bins.max(1);
    let s = stats::sorted(values);
    let (min, max) = match (s.first(), s.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0.0, 0.0),
    };
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in &s {
        let idx = if width > 0.0 { (((v - min) / width) as usize).min(bins - 1) } else { 0 };
        counts[idx] += 1;
    }
    Histogram {
        scheme: scheme.name().to_string(),
        min,
        max,
        std: stats::std_dev(&s),
        bins: counts
            .into_iter()
            .enumerate()
            .map(|(i, c)| (min + width * i as f64, if i + 1 == bins { max } else { min + width * (i + 1) as f64 }, c))
            .collect(),
    }
}

fn write_hist(out: &mut Writer, format: OutputFormat, hists: &[Histogram]) -> PipelineResult<()> {
    match format {
        OutputFormat::Json => out.json("hist.json", &hists),
        OutputFormat::Csv => {
            let rows = hists
                .iter()
                .flat_map(|h| h.bins.iter().map(move |&(lo, hi, c)| vec![h.scheme.clone(), num(lo), num(hi), c.to_string()]))
                .collect();
            out.csv("hist.csv", &["scheme", "bin_lo", "bin_hi", "count"], rows)
        }
    }
}
