use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fairnfr::catalog::{largest_connected_component, load_score_matrix, threshold_binarize};
use fairnfr::fairness::{bound_f_kl, bound_f_max, bound_f_tv, DEFAULT_SMOOTHING};
use fairnfr::harness::{
    distance_cdf, export, price_of_fairness_curve, run_scenario_on, sweep, Algorithm, DatasetSpec, DirectDemand,
    ExportFormat, GridSpec, PreparedScenario, ScenarioConfig, SweepRow, WORKERS_ENV,
};
use fairnfr::optimizer::{build_fair_nfr_lp_with, write_lp, CandidateMode, FairnessConstraintSpec, FairnessMetric, DEFAULT_SOLVER_TOLERANCE};

#[derive(Parser)]
#[command(name = "fairnfr", version, about = "Fair network-friendly recommendation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an edge list and write the cleaned dataset.
    Ingest(IngestArgs),
    /// Run a single scenario.
    Run(RunArgs),
    /// Run every cell of a JSON grid file.
    Sweep(SweepArgs),
    /// Price-of-fairness curve of one scenario.
    Curve(CurveArgs),
    /// Evaluate the fairness lower bounds for a gain.
    Bounds(BoundsArgs),
    /// CDF of relative distances from a bound over sweep results.
    Cdf(CdfArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Edge list with a `K=<size>` header and `i,j,score` rows.
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Keep scores strictly above this value, set to 1.
    #[arg(long)]
    threshold: Option<f64>,
    /// Restrict to the largest connected component.
    #[arg(long)]
    largest_component: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmName {
    Baseline,
    Greedy,
    Cabaret,
    Multistep,
    FairNfr,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricName {
    FMax,
    FTv,
    FKl,
}

impl From<MetricName> for FairnessMetric {
    fn from(m: MetricName) -> Self {
        match m {
            MetricName::FMax => FairnessMetric::Max,
            MetricName::FTv => FairnessMetric::Tv,
            MetricName::FKl => FairnessMetric::Kl,
        }
    }
}

/// KL budgets on the command line are normalized; the optimizer wants nats.
fn budget_in_solver_units(metric: FairnessMetric, budget: f64, smoothing: f64) -> f64 {
    match metric {
        FairnessMetric::Kl => budget * (1.0 / smoothing).ln(),
        _ => budget,
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON scenario file; when given, the flags below are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Edge-list dataset.
    #[arg(long, conflicts_with = "synthetic")]
    edge_list: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    largest_component: bool,
    /// Synthetic catalog size.
    #[arg(long)]
    synthetic: Option<usize>,
    #[arg(long, default_value_t = 5)]
    degree: usize,
    #[arg(long)]
    binary: bool,
    #[arg(long, default_value_t = 0.8)]
    alpha: f64,
    /// Recommendation list size N.
    #[arg(short = 'n', long, default_value_t = 2)]
    list_size: usize,
    /// Cache size C.
    #[arg(short = 'c', long, default_value_t = 10)]
    cache_size: usize,
    /// Quality factor q.
    #[arg(short = 'q', long, default_value_t = 0.8)]
    quality: f64,
    /// Zipf exponent of direct demand; 0 is uniform.
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_SMOOTHING)]
    smoothing: f64,
    #[arg(long, default_value_t = DEFAULT_SOLVER_TOLERANCE)]
    tolerance: f64,
    /// Give every flow variable to the LP instead of the sparse candidate set.
    #[arg(long)]
    full_candidates: bool,
}

impl ScenarioArgs {
    fn scenario(&self, algorithm: Algorithm) -> Result<ScenarioConfig> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let dataset = match (&self.edge_list, self.synthetic) {
            (Some(path), _) => DatasetSpec::EdgeList {
                path: path.clone(),
                threshold: self.threshold,
                largest_component: self.largest_component,
            },
            (None, Some(size)) => DatasetSpec::Synthetic {
                size,
                avg_out_degree: self.degree,
                binary: self.binary,
            },
            (None, None) => bail!("give --config, --edge-list or --synthetic"),
        };
        let direct = if self.zipf == 0.0 {
            DirectDemand::Uniform
        } else {
            DirectDemand::Zipf { exponent: self.zipf }
        };
        Ok(ScenarioConfig {
            dataset,
            alpha: self.alpha,
            list_size: self.list_size,
            cache_size: self.cache_size,
            quality: self.quality,
            direct,
            algorithm,
            seed: self.seed,
            smoothing: self.smoothing,
            solver_tolerance: self.tolerance,
            candidates: if self.full_candidates {
                CandidateMode::Full
            } else {
                CandidateMode::Sparse
            },
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum, default_value = "multistep")]
    algorithm: AlgorithmName,
    /// BFS width; defaults to the list size.
    #[arg(long)]
    width: Option<usize>,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, value_enum, default_value = "f-max")]
    metric: MetricName,
    /// Fairness budget; KL budgets are normalized by ln(1/w).
    #[arg(long, default_value_t = 0.0)]
    budget: f64,
    /// Output file (`.csv` or `.json`); JSON to stdout otherwise.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the LP in CPLEX LP format (multistep and fair-nfr only).
    #[arg(long)]
    export_lp: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON grid file.
    grid: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Output format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    metric: MetricName,
    /// Comma-separated ascending budgets; KL budgets are normalized.
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Network gain G.
    #[arg(long, allow_negative_numbers = true)]
    gain: f64,
    /// Cache size C.
    #[arg(long)]
    cache_size: usize,
    /// Baseline cache hit ratio H.
    #[arg(long)]
    baseline_chr: f64,
}

#[derive(Args)]
struct CdfArgs {
    /// Sweep results in JSON.
    results: PathBuf,
    #[arg(long, value_enum)]
    metric: MetricName,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn format_for(path: &Path, explicit: Option<&str>) -> Result<ExportFormat> {
    let name = match explicit {
        Some(f) => f.to_string(),
        None => path
            .extension()
            .map(|e| e.to_string_lossy().into_owned())
            .unwrap_or_default(),
    };
    Ok(name.parse::<ExportFormat>()?)
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let loaded = load_score_matrix(&args.input)?;
    let mut m = loaded.matrix;
    if let Some(t) = args.threshold {
        m = threshold_binarize(&m, t)?;
    }
    if args.largest_component {
        m = largest_connected_component(&m).0;
    }
    let file = fs::File::create(&args.output).with_context(|| format!("creating {}", args.output.display()))?;
    m.write_edge_list(std::io::BufWriter::new(file))?;
    let summary = json!({
        "catalog_size": m.size(),
        "entries": m.nnz(),
        "self_loops_dropped": loaded.self_loops_dropped,
        "components": m.components().len(),
    });
    println!("{summary}");
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let s = &args.scenario;
    let algorithm = match args.algorithm {
        AlgorithmName::Baseline => Algorithm::Baseline,
        AlgorithmName::Greedy => Algorithm::Greedy,
        AlgorithmName::Cabaret => Algorithm::Cabaret {
            width: args.width.unwrap_or(s.list_size),
            depth: args.depth,
        },
        AlgorithmName::Multistep => Algorithm::Multistep,
        AlgorithmName::FairNfr => {
            let metric = args.metric.into();
            Algorithm::FairNfr {
                fairness: FairnessConstraintSpec::new(metric, budget_in_solver_units(metric, args.budget, s.smoothing)),
            }
        }
    };
    let cfg = s.scenario(algorithm)?;
    let matrix = cfg.dataset.load(cfg.seed)?;
    if let Some(path) = &args.export_lp {
        let spec = match &cfg.algorithm {
            Algorithm::Multistep => None,
            Algorithm::FairNfr { fairness } => Some(fairness),
            _ => bail!("--export-lp needs the multistep or fair-nfr algorithm"),
        };
        let prep = PreparedScenario::new(&cfg, &matrix)?;
        let model = build_fair_nfr_lp_with(
            &matrix,
            &prep.baseline,
            &prep.cache,
            &prep.user,
            cfg.quality,
            spec,
            cfg.candidates,
        )?;
        write_lp(&model, path)?;
    }
    let result = run_scenario_on(&cfg, &matrix)?;
    let row = SweepRow {
        index: 0,
        config: cfg,
        result: Some(result),
        error: None,
    };
    match &args.output {
        Some(path) => export(&[row], path, format_for(path, None)?)?,
        None => emit(&format!("{}\n", serde_json::to_string_pretty(&row)?), None)?,
    }
    Ok(())
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let text = fs::read_to_string(&args.grid).with_context(|| format!("reading {}", args.grid.display()))?;
    let grid: GridSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", args.grid.display()))?;
    let format = format_for(&args.output, args.format.as_deref())?;
    let rows = sweep(&grid, args.workers)?;
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    export(&rows, &args.output, format)?;
    eprintln!("{} scenarios, {failed} failed", rows.len());
    Ok(())
}

fn curve(args: &CurveArgs) -> Result<()> {
    let cfg = args.scenario.scenario(Algorithm::Multistep)?;
    let metric: FairnessMetric = args.metric.into();
    let budgets: Vec<f64> = args
        .budgets
        .iter()
        .map(|&b| budget_in_solver_units(metric, b, cfg.smoothing))
        .collect();
    let curve = price_of_fairness_curve(&cfg, metric, &budgets)?;
    emit(
        &format!("{}\n", serde_json::to_string_pretty(&curve)?),
        args.output.as_deref(),
    )
}

fn bounds(args: &BoundsArgs) -> Result<()> {
    let kl = bound_f_kl(args.gain, args.baseline_chr)?;
    let summary = json!({
        "gain": args.gain,
        "cache_size": args.cache_size,
        "baseline_chr": args.baseline_chr,
        "f_max": bound_f_max(args.gain, args.cache_size)?,
        "f_tv": bound_f_tv(args.gain),
        "f_kl_raw": kl,
    });
    println!("{summary}");
    Ok(())
}

fn cdf(args: &CdfArgs) -> Result<()> {
    let rows = fairnfr::harness::read_json(&args.results)?;
    let results = rows.iter().filter_map(|r| r.result.as_ref());
    let cdf = distance_cdf(results, args.metric.into());
    let mut text = String::from("distance,cdf\n");
    for (d, f) in &cdf.points {
        text.push_str(&format!("{d},{f}\n"));
    }
    emit(&text, args.output.as_deref())?;
    let median = cdf.median.map_or("none".to_string(), |m| m.to_string());
    eprintln!(
        "{} scenarios, median distance {median}, {} without gain excluded",
        cdf.count,
        cdf.excluded_zero_gain
    );
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Curve(a) => curve(a),
        Command::Bounds(a) => bounds(a),
        Command::Cdf(a) => cdf(a),
    }
}
