//! Command-line definitions and the `--config` file merge.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "normproj",
    version,
    about = "Closest-point projections, Gauss maps and box-counting probes"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Plain-text `key=value` file; explicit flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Caps the number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gauss-map diagnostics and fixed points of a norm.
    NormInfo(NormInfoArgs),
    /// Gauss map at a point, or on a sweep of the unit sphere.
    Gauss(GaussArgs),
    /// Closest-point projection onto a hyperplane.
    Project(ProjectArgs),
    /// The C^1 norm built from a Cantor staircase.
    #[command(subcommand)]
    Counterexample(CounterexampleCommand),
    /// Writes a point cloud.
    Set(SetArgs),
    /// Box-counting dimension of a point cloud.
    Dim(DimArgs),
    /// Projected-dimension profile over a direction grid.
    Sweep(SweepArgs),
    /// Runs the verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleCommand {
    /// Writes the support table and a JSON sidecar.
    Build(BuildArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Euclidean,
    Lp,
    InnerProduct,
    Table,
    Counterexample,
}

#[derive(Debug, Clone, Args)]
pub struct NormArgs {
    #[arg(long, value_enum, default_value = "euclidean")]
    pub norm: NormKind,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Exponent of the `L^p` norm.
    #[arg(long)]
    pub p: Option<f64>,
    /// Row-major entries of the SPD matrix `Q`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Support table CSV for `--norm table`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[command(flatten)]
    pub cantor: CantorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CantorArgs {
    /// Number of branches of the Cantor set.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Contraction ratio of the Cantor set.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub r: f64,
    #[arg(long, default_value_t = 12)]
    pub level: u32,
    /// Rows of the support table.
    #[arg(long, default_value_t = 4096)]
    pub rows: usize,
    /// Circular arcs in each glue piece.
    #[arg(long, default_value_t = 16)]
    pub arcs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NormInfoArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    /// Points of the Gauss-map sweep.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GaussArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    /// Point whose ray meets the sphere, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
    pub x: Option<Vec<f64>>,
    /// Number of polar angles for a CSV sweep.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lemma,
    Direct,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    /// Normal of the target hyperplane.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub w: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub x: Vec<f64>,
    #[arg(long, value_enum, default_value = "lemma")]
    pub method: Method,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub cantor: CantorArgs,
    /// Support table CSV; the sidecar goes next to it with extension `.json`.
    #[arg(long, required = true)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    Cantor,
    CantorProduct,
    FourCorner,
    Square,
    Segment,
    Circle,
}

#[derive(Debug, Clone, Args)]
pub struct SetSpec {
    #[arg(long = "set", alias = "kind", value_enum, default_value = "cantor-product")]
    pub set: SetKind,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub ratio: f64,
    #[arg(long = "gen", default_value_t = 8)]
    pub generation: u32,
    /// Number of points of a circle cloud.
    #[arg(long, default_value_t = 4096)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SetArgs {
    #[command(flatten)]
    pub spec: SetSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ScaleArgs {
    /// Box sizes are `base^-k` for `k` from `kmin` to `kmax`.
    #[arg(long, default_value_t = 2)]
    pub kmin: u32,
    /// Defaults to the finest admissible scale.
    #[arg(long)]
    pub kmax: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct DimArgs {
    #[command(flatten)]
    pub spec: SetSpec,
    #[command(flatten)]
    pub scales: ScaleArgs,
    /// JSON estimate; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV of `delta,count`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub spec: SetSpec,
    #[command(flatten)]
    pub scales: ScaleArgs,
    #[arg(long, default_value_t = 720)]
    pub directions: usize,
    /// Exceptional threshold; defaults to `min(1, dim) - 0.1`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Use the angle family with constant splitting angle instead of a norm.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// CSV of `angle,slope,r2,flagged`; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0x5EED)]
    pub seed: u64,
    /// Negates the glue radii to exercise the failure path.
    #[arg(long)]
    pub broken_glue: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected key=value", i + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

const SUBCOMMANDS: [&str; 8] = [
    "norm-info",
    "gauss",
    "project",
    "counterexample",
    "set",
    "dim",
    "sweep",
    "verify",
];

/// Splices the config entries into `argv` right after the subcommand
/// path, so that flags given on the command line come later and win.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read config {path}"))?;
    let entries = read_config(&text)?;
    let Some(mut at) = argv.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok(argv);
    };
    at += 1;
    if argv[at - 1] == "counterexample" && argv.get(at).is_some_and(|a| !a.starts_with('-')) {
        at += 1;
    }
    let mut injected = Vec::new();
    for (k, v) in entries {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let mut out = argv[..at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}
