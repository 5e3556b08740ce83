//! `boxclust`: flat clustering, hierarchies, benchmarks and synthetic data
//! from the command line.
//!
//! Exit codes: 0 on success, 2 for bad input or parameters, 3 when an
//! internal invariant breaks, 1 when output cannot be written.

mod config;
mod input;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use boxclust::bench::{generate, write_csv, DatasetSpec, Shape};
use boxclust::hdbscan::extract_with;
use boxclust::{
    approx_hdbscan, core_distances, dbscan, hdbscan, ApproxParams, BoxMode, Label, Labeling, Meter,
    PairCheck, Params, PointSet64, Variant,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use config::BenchConfig;
use input::{format_points, parse_points, Format};

#[derive(Parser)]
#[command(name = "boxclust", version, about = "Density-based clustering on box graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DBSCAN or DBSCAN* labels for a point file.
    Cluster(ClusterArgs),
    /// Planar HDBSCAN hierarchy, exact or approximate, with optional cuts.
    Hierarchy(HierarchyArgs),
    /// Runs a benchmark sweep described by a TOML file.
    Bench(BenchArgs),
    /// Writes a synthetic clustered data set.
    Gen(GenArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Point file, one point per line.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 4)]
    min_pts: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Dbscan)]
    variant: VariantArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Grid)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = PairCheckArg::Brute)]
    pair_check: PairCheckArg,
    /// Seed for the randomized pair check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HierarchyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 4)]
    min_pts: usize,
    /// Build the δ-approximate hierarchy instead of the exact one.
    #[arg(long)]
    delta: Option<f64>,
    /// ε at which to cut the hierarchy; each cut goes to `<output>.cut<ε>`.
    #[arg(long = "cut")]
    cuts: Vec<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Replaces the data set seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Replaces the output path of the config.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 4)]
    clusters: usize,
    #[arg(long, default_value_t = 1000)]
    per_cluster: usize,
    #[arg(long, value_enum, default_value_t = ShapeArg::Gaussian)]
    shape: ShapeArg,
    /// Noise points as a fraction of the cluster points.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    #[default]
    Dbscan,
    DbscanStar,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Dbscan => Variant::Dbscan,
            VariantArg::DbscanStar => Variant::DbscanStar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strip,
    Grid,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairCheckArg {
    Delaunay,
    #[default]
    Brute,
}

impl From<PairCheckArg> for PairCheck {
    fn from(p: PairCheckArg) -> Self {
        match p {
            PairCheckArg::Delaunay => PairCheck::Delaunay,
            PairCheckArg::Brute => PairCheck::RandomizedBrute,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Gaussian,
    UniformBall,
}

/// Failure to write results, as opposed to bad input.
#[derive(Debug)]
struct OutputError(std::io::Error);

impl std::fmt::Display for OutputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for OutputError {}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Hierarchy(a) => cmd_hierarchy(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<OutputError>().is_some() {
        return 1;
    }
    match e.downcast_ref::<boxclust::Error>() {
        Some(boxclust::Error::Internal(_) | boxclust::Error::Disconnected { .. }) => 3,
        _ => 2,
    }
}

fn read_points(a: &InputArgs) -> Result<PointSet64> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("cannot read {}", a.input.display()))?;
    parse_points(&text, a.format).with_context(|| format!("cannot parse {}", a.input.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    let res = match path {
        Some(p) => fs::write(p, text),
        None => std::io::Write::write_all(&mut std::io::stdout().lock(), text.as_bytes()),
    };
    res.map_err(|e| anyhow!(OutputError(e)))
}

/// `index,label,cluster_id` per point, `-1` as the id of noise.
fn format_labeling(l: &Labeling) -> String {
    let mut s = String::new();
    for (i, lab) in l.labels().iter().enumerate() {
        let id = lab.cluster().map_or(-1, |c| c as i64);
        writeln!(s, "{i},{},{id}", lab.kind()).expect("string write");
    }
    s
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let ps = read_points(&a.input)?;
    let params = Params::new(a.eps, a.min_pts, a.variant.into())?;
    let mode = match a.mode {
        ModeArg::Strip => BoxMode::Strip,
        ModeArg::Grid => BoxMode::Grid,
    };
    let labeling = dbscan(&ps, &params, mode, a.pair_check.into(), &mut Meter::with_seed(a.seed))?;
    write_out(a.output.as_deref(), &format_labeling(&labeling))
}

fn cmd_hierarchy(a: HierarchyArgs) -> Result<()> {
    let ps = read_points(&a.input)?;
    if a.min_pts == 0 {
        bail!(boxclust::Error::InvalidParameter("min_pts must be at least 1".into()));
    }
    if let Some(&bad) = a.cuts.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        bail!(boxclust::Error::InvalidParameter(format!("cut eps must be finite and non-negative, got {bad}")));
    }
    if !a.cuts.is_empty() && a.output.is_none() {
        bail!(boxclust::Error::InvalidParameter("--cut needs --output to name the cut files".into()));
    }
    let approx = a.delta.map(ApproxParams::new).transpose()?;
    if ps.len() <= 1 {
        // A lone point never merges, and it is core at every ε once
        // min_pts allows it.
        write_out(a.output.as_deref(), "")?;
        let label = if a.min_pts <= ps.len() { Label::Core(0) } else { Label::Noise };
        for &eps in &a.cuts {
            write_cut(a.output.as_deref(), eps, &Labeling::new(vec![label; ps.len()]))?;
        }
        return Ok(());
    }
    let dendrogram = match approx {
        Some(ap) => approx_hdbscan(&ps, a.min_pts, ap)?,
        None => hdbscan(&ps, a.min_pts)?,
    };
    write_out(a.output.as_deref(), &dendrogram.to_text())?;
    if !a.cuts.is_empty() {
        let cd = core_distances(&ps, a.min_pts)?;
        for &eps in &a.cuts {
            write_cut(a.output.as_deref(), eps, &extract_with(&dendrogram, eps, &cd)?)?;
        }
    }
    Ok(())
}

fn write_cut(output: Option<&Path>, eps: f64, labeling: &Labeling) -> Result<()> {
    let mut name = output.expect("checked by the caller").as_os_str().to_owned();
    name.push(format!(".cut{eps}"));
    write_out(Some(Path::new(&name)), &format_labeling(labeling))
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let text = fs::read_to_string(&a.config).with_context(|| format!("cannot read {}", a.config.display()))?;
    let mut cfg = BenchConfig::parse(&text).with_context(|| format!("bad config {}", a.config.display()))?;
    if let Some(seed) = a.seed {
        cfg.dataset.seed = seed;
    }
    let Some(output) = a.output.or_else(|| cfg.output.clone()) else {
        bail!("no output path: set `output` in the config or pass --output");
    };
    let records = cfg.run()?;
    let mut csv = Vec::new();
    write_csv(&records, &mut csv)?;
    fs::write(&output, csv).map_err(|e| anyhow!(OutputError(e)))?;
    write_out(None, &cfg.summary(&records))
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let spec = DatasetSpec {
        dim: a.dim,
        clusters: a.clusters,
        per_cluster: a.per_cluster,
        shape: match a.shape {
            ShapeArg::Gaussian => Shape::Gaussian,
            ShapeArg::UniformBall => Shape::UniformBall,
        },
        noise_fraction: a.noise,
        seed: a.seed,
    };
    let (ps, labels) = generate::<f64>(&spec)?;
    write_out(Some(&a.output), &format_points(&ps, a.format))?;
    let mut name = a.output.as_os_str().to_owned();
    name.push(".labels");
    let text: String = labels.iter().map(|l| format!("{l}\n")).collect();
    write_out(Some(Path::new(&name)), &text)
}
