use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use multiplex_forman::generators::{GraphKind, WeightRange};
use multiplex_forman::normalization::NormalizationScheme;
use multiplex_forman::pipeline::{run_pipeline, Command, DatasetKind, InputSource, OutputFormat, PipelineError, RunConfig};

#[derive(Parser)]
#[command(name = "mforman", version, about = "Forman curvature for doubly-weighted multiplex graphs")]
#[command(group(ArgGroup::new("source").args(["input", "generate", "dataset"])))]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Graph file in the multiplex-graph JSON format.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Comma-separated generator specs, one layer each: complete:N, cycle:N,
    /// tree:R:DEPTH, er:N:P, karate.
    #[arg(long, global = true)]
    generate: Option<String>,
    /// Labelled dataset for `features`.
    #[arg(long, global = true, value_enum)]
    dataset: Option<DatasetArg>,
    /// Dataset size.
    #[arg(long, global = true, default_value_t = 300)]
    count: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    normalize: Option<NormalizeArg>,
    /// Target interval for bounded scaling, `lo:hi`.
    #[arg(long, global = true)]
    range: Option<String>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// WL refinement rounds.
    #[arg(long, global = true, default_value_t = 3)]
    iterations: usize,
    /// Vertex-weight range for generated layers: `unit`, `c` or `lo:hi`.
    #[arg(long, global = true, default_value = "0.01:1")]
    vertex_weights: String,
    /// Edge-weight range for generated layers.
    #[arg(long, global = true, default_value = "1:10")]
    edge_weights: String,
    /// Histogram bins.
    #[arg(long, global = true, default_value_t = 20)]
    bins: usize,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Curvature of every edge.
    Curvature,
    /// Analytic partials and dimensionless sensitivities per layer.
    Sensitivity,
    /// CE, CE^uni and their difference per vertex.
    Evaluate,
    /// Vertex, layer and edge selected by the weakness cascade.
    Identify,
    /// Write the (normalized) input graph to graph.json.
    Generate,
    /// Feature matrix CSV.
    Features,
    /// Curvature histograms under both normalization schemes.
    Hist,
}

#[derive(ValueEnum, Clone, Copy)]
enum DatasetArg {
    Bridge,
    Karate,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum NormalizeArg {
    Mean,
    Bounded,
    None,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

fn usage(msg: impl Into<String>) -> PipelineError {
    PipelineError::Usage(msg.into())
}

fn config(cli: Cli) -> Result<RunConfig, PipelineError> {
    let command = match cli.command {
        Cmd::Curvature => Command::Curvature,
        Cmd::Sensitivity => Command::Sensitivity,
        Cmd::Evaluate => Command::Evaluate,
        Cmd::Identify => Command::Identify,
        Cmd::Generate => Command::Generate,
        Cmd::Features => Command::Features,
        Cmd::Hist => Command::Hist,
    };
    let input = match (cli.input, cli.generate, cli.dataset) {
        (Some(path), None, None) => InputSource::File(path),
        (None, Some(specs), None) => InputSource::Generate(
            specs
                .split(',')
                .map(|s| s.parse::<GraphKind>())
                .collect::<Result<_, _>>()?,
        ),
        (None, None, Some(d)) => InputSource::Dataset {
            kind: match d {
                DatasetArg::Bridge => DatasetKind::Bridge,
                DatasetArg::Karate => DatasetKind::Karate,
            },
            count: cli.count,
        },
        _ => return Err(usage("exactly one of --input, --generate or --dataset is required")),
    };
    let range = cli
        .range
        .as_deref()
        .map(|r| {
            let (lo, hi) = r.split_once(':').ok_or_else(|| usage(format!("--range expects lo:hi, got {r:?}")))?;
            let parse = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number {t:?} in --range")));
            Ok::<_, PipelineError>(NormalizationScheme::bounded(parse(lo)?, parse(hi)?)?)
        })
        .transpose()?;
    let normalization = match (cli.normalize, range) {
        (Some(NormalizeArg::Mean), Some(_)) => return Err(usage("--range only applies to bounded normalization")),
        (Some(NormalizeArg::None), Some(_)) => return Err(usage("--range conflicts with --normalize none")),
        (Some(NormalizeArg::Mean), None) => Some(NormalizationScheme::Mean),
        (Some(NormalizeArg::None), None) => None,
        (_, Some(bounded)) => Some(bounded),
        (_, None) => Some(NormalizationScheme::DEFAULT_BOUNDED),
    };
    let mut cfg = RunConfig::new(command, input, cli.out);
    cfg.normalization = normalization;
    cfg.seed = cli.seed;
    cfg.format = match cli.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    cfg.wl_iterations = cli.iterations;
    cfg.vertex_weights = cli.vertex_weights.parse::<WeightRange>()?;
    cfg.edge_weights = cli.edge_weights.parse::<WeightRange>()?;
    cfg.bins = cli.bins;
    Ok(cfg)
}

fn main() -> ExitCode {
    let result = config(Cli::parse()).and_then(|cfg| run_pipeline(&cfg));
    match result {
        Ok(out) => {
            // a closed pipe on stdout is not a failure; the files are written
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{}", out.summary);
            for f in out.files {
                let _ = writeln!(stdout, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.category().exit_code() as u8)
        }
    }
}
