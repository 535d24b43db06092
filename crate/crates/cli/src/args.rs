use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const GRAMMAR: &str = "\
Families (--family):
  antitree:<spheres>   sphere r completely joined to sphere r+1
  tree:<spheres>       every sphere-r vertex has s_{r+1}/s_r children
  line                 the integer line, rooted at 0

Sphere sizes (<spheres>):
  poly:k               s_r = (r+1)^k
  const:c              s_0 = 1, s_r = c
  geom:b               s_r = b^r
  regular:d            s_0 = 1, s_r = d(d-1)^(r-1)
  list:[a,b,...]       explicit prefix starting with 1; the last entry repeats

Exit codes: 0 success, 1 validation error, 2 resource cap, 3 solver
non-convergence. Failures print {\"error\", \"kind\", \"stage\"} as JSON on stderr.
SPECGROWTH_MAX_VERTICES overrides the vertex cap for truncations.";

#[derive(Debug, Parser)]
#[command(
    name = "specgrowth",
    version,
    about = "Intrinsic metrics, volume growth and spectral bounds for weighted graph Laplacians",
    after_help = GRAMMAR
)]
pub struct Cli {
    /// Worker threads for data-parallel stages; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Run every stage on the sequential path.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a family truncation as a graph file.
    Generate(GenerateArgs),
    /// Distances from the root, adaptedness and jump size.
    Metric(MetricCmd),
    /// Ball table and growth-rate estimates.
    Growth(GrowthCmd),
    /// Closed-form upper bounds from growth rates.
    Bounds(BoundsCmd),
    /// Variational bound, Dirichlet exhaustion and annulus brackets.
    Spectrum(SpectrumCmd),
    /// Full pipeline in one report.
    Analyze(AnalyzeCmd),
    /// Randomized property suite with a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureArg {
    Unit,
    #[value(alias = "weighted-degree")]
    Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    Natural,
    Huang,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConventionArg {
    Half,
    Full,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct InputArgs {
    /// Graph file (JSON).
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    /// Family spec, e.g. antitree:poly:2, tree:regular:4, line.
    #[arg(long)]
    pub family: Option<String>,
    /// Truncation radius for --family.
    #[arg(long, default_value_t = 10)]
    pub radius: usize,
    /// Vertex measure for --family.
    #[arg(long, value_enum, default_value_t = MeasureArg::Unit)]
    pub measure: MeasureArg,
    /// Root vertex.
    #[arg(long, default_value_t = 0)]
    pub root: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value_t = MetricArg::Natural)]
    pub metric: MetricArg,
    /// Adaptedness convention; defaults to half for natural, full for huang.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GrowthArgs {
    /// Largest ball radius; defaults to the truncation radius or eccentricity.
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Estimation window LO:HI; defaults to [rmax/2, rmax].
    #[arg(long)]
    pub window: Option<String>,
    /// Radius grid step; defaults to 1 for natural, delta_min/2 otherwise.
    #[arg(long)]
    pub step: Option<f64>,
    /// Largest number of centers for the minimal growth rate.
    #[arg(long, default_value_t = 256)]
    pub centers: usize,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SpectralArgs {
    /// Alpha grid: LO:HI:N (N points) or a comma list.
    #[arg(long)]
    pub alpha_grid: Option<String>,
    /// Exhaustion radii, comma separated and increasing.
    #[arg(long)]
    pub radii: Option<String>,
    /// Inner radii of annulus brackets, comma separated.
    #[arg(long)]
    pub annulus_in: Option<String>,
    /// Outer radius of annulus brackets.
    #[arg(long)]
    pub annulus_out: Option<usize>,
    /// Relative residual tolerance of the eigensolver.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Matrix-vector product cap of the eigensolver.
    #[arg(long, default_value_t = 20_000)]
    pub max_matvecs: usize,
    /// Level for the antitree supersolution check.
    #[arg(long, default_value_t = 2.0)]
    pub super_lambda: f64,
    /// Write per-cycle solver traces into the CSV directory.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct OutputArgs {
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for CSV side outputs.
    #[arg(long)]
    pub emit_csv: Option<PathBuf>,
    /// Seed recorded in the report and used for the eigensolver start vector.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GenerateArgs {
    /// Generator tokens, e.g. `antitree poly:2 R=3`, `line R=5`,
    /// `tree branching=3 depth=4`.
    #[arg(required = true, num_args = 1..)]
    pub spec: Vec<String>,
    /// Sphere sizes, overriding a profile token.
    #[arg(long)]
    pub spheres: Option<String>,
    /// Truncation radius, overriding R=/depth= tokens.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, value_enum)]
    pub measure: Option<MeasureArg>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MetricCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GrowthCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub growth: GrowthArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct BoundsCmd {
    /// Exponential growth rate; computed from the input when absent.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Minimal exponential growth rate.
    #[arg(long)]
    pub mu_tilde: Option<f64>,
    /// Lower end of the jump size range, in [0, 1].
    #[arg(long)]
    pub delta: Option<f64>,
    /// Halve the bounds (metric adapted under the full convention).
    #[arg(long)]
    pub halved: bool,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub growth: GrowthArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct SpectrumCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub growth: GrowthArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct AnalyzeCmd {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub metric: MetricArgs,
    #[command(flatten)]
    pub growth: GrowthArgs,
    #[command(flatten)]
    pub spectral: SpectralArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Random graphs in the suite.
    #[arg(long, default_value_t = 50)]
    pub graphs: usize,
    /// Vertex bound of the random graphs.
    #[arg(long, default_value_t = 50)]
    pub max_vertices: usize,
    /// Test-function instances per graph.
    #[arg(long, default_value_t = 4)]
    pub instances: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// JSON report path; the table always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
