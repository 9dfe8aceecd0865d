use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "sunlab", version, about = "Best-approximation experiments in polyhedral normed spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed recorded in the report and used by every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Also write an SVG figure (two-dimensional inputs only).
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Slab description of the interval between two points.
    Interval(IntervalArgs),
    /// Outer approximation of the ball hull of two points.
    Hull(HullArgs),
    /// Pairwise m-connectedness of a cloud.
    Mconnect(MconnectArgs),
    /// Discrete geodesic between two cloud points.
    Path(PathArgs),
    /// Nearest cloud points to a query.
    Project(ProjectArgs),
    /// Sampled sun check of a cloud.
    Sun(SunArgs),
    /// Coordinate embedding of a cloud into a max-norm space.
    Embed(EmbedArgs),
    /// Invariant suite over builtin and random spaces.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Interval(_) => "interval",
            Command::Hull(_) => "hull",
            Command::Mconnect(_) => "mconnect",
            Command::Path(_) => "path",
            Command::Project(_) => "project",
            Command::Sun(_) => "sun",
            Command::Embed(_) => "embed",
            Command::Verify(_) => "verify",
        }
    }
}

/// A comma-separated vector such as `1,-0.5`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl FromStr for Point {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                match t.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(format!("not a finite number: {t:?}")),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Point(values))
    }
}

/// A comma-separated list of indices.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| format!("not an index: {t:?}")))
            .collect::<Result<Vec<_>, _>>()
            .map(IndexList)
    }
}

/// Neighbour radius of the betweenness graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Radius {
    Auto,
    Complete,
    Fixed(f64),
}

impl FromStr for Radius {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Radius::Auto),
            "complete" => Ok(Radius::Complete),
            other => match other.parse::<f64>() {
                Ok(r) if r >= 0.0 && r.is_finite() => Ok(Radius::Fixed(r)),
                _ => Err(format!("expected auto, complete or a nonnegative radius, got {other:?}")),
            },
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Auto => f.write_str("auto"),
            Radius::Complete => f.write_str("complete"),
            Radius::Fixed(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum HullChoice {
    Interval,
    Oracle,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IntervalArgs {
    /// Builtin name (linf2, l1_3, ...) or path to a space JSON file.
    #[arg(long)]
    pub space: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Point,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Point,
    /// Optional point to test for membership.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<Point>,
    /// Slab membership tolerance.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct HullArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Point,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Point,
    /// Number of sampled balls.
    #[arg(long, default_value_t = 10_000)]
    pub balls: usize,
    /// Lattice points per axis (default depends on the dimension).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Ball membership tolerance.
    #[arg(long, default_value_t = 2e-10, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct MconnectArgs {
    #[arg(long)]
    pub space: String,
    /// Cloud file (.json or .csv).
    #[arg(long)]
    pub cloud: PathBuf,
    /// Set used as the hull of a pair.
    #[arg(long, value_enum, default_value_t = HullChoice::Interval)]
    pub hull: HullChoice,
    /// Balls per pair in oracle mode.
    #[arg(long, default_value_t = 1000)]
    pub balls: usize,
    /// Sampling resolution (default: smallest pairwise distance).
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Include the full pair relation in the report.
    #[arg(long)]
    pub graph: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PathArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub cloud: PathBuf,
    /// Index of the start point.
    #[arg(long)]
    pub from: usize,
    /// Index of the end point.
    #[arg(long)]
    pub to: usize,
    /// geometric, uniform, a comma list of coefficients, or a JSON file.
    #[arg(long, default_value = "geometric")]
    pub weights: String,
    /// Additive length slack (default 1e-6 times the endpoint distance).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Monotonicity tolerance.
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    pub tol: f64,
    /// Graph neighbour radius: auto, complete, or a number.
    #[arg(long, default_value_t = Radius::Auto)]
    pub radius: Radius,
}

#[derive(Debug, Args, Serialize)]
pub struct ProjectArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub cloud: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Point,
    /// Relative tie tolerance.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SunArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub cloud: PathBuf,
    /// A single query; random queries are drawn when absent.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<Point>,
    /// Number of random queries.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Padding of the query box around the cloud.
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 16.0, value_parser = positive)]
    pub lambda_max: f64,
    /// Number of lambda samples.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Require every nearest point to pass.
    #[arg(long)]
    pub strict: bool,
    /// Relative tie tolerance.
    #[arg(long, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long)]
    pub space: String,
    #[arg(long)]
    pub cloud: PathBuf,
    /// Representative functionals to keep (default: all).
    #[arg(long)]
    pub indices: Option<IndexList>,
    /// Slack for the contraction and transport checks.
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Restrict the suite to one space.
    #[arg(long)]
    pub space: Option<String>,
    /// Random triples per space; the other sections scale with it.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value = "geometric")]
    pub weights: String,
}
