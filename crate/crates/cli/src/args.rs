use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "momentgap",
    version,
    about = "Determinacy diagnostics for truncated moment sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a criterion suite and write an evidence report.
    Analyze(AnalyzeArgs),
    /// Verdicts along a set of directions, as a CSV table with an aggregate footer.
    Scan(ScanArgs),
    /// Poisson widths over a field of points in the upper half-space, as CSV.
    Kappa(KappaArgs),
    /// Lift a measure on the line to a polynomial curve and test it.
    Curve(CurveArgs),
}

/// Where the moments come from and how to compute with them.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Moment file, or a measure definition to generate moments from.
    #[arg(long)]
    pub input: PathBuf,

    /// `rational` or `float:BITS`; defaults to the mode of a moment file,
    /// rational for measure definitions.
    #[arg(long)]
    pub mode: Option<String>,

    /// Degree budget: moments are generated or truncated to this degree.
    #[arg(long)]
    pub degree: Option<usize>,

    /// Replace the support hint of the input.
    #[arg(long, value_enum)]
    pub support: Option<SupportArg>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportArg {
    Full,
    Orthant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlavorArg {
    #[default]
    Hamburger,
    Stieltjes,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormatArg {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Comma-separated criteria; every applicable one when omitted.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Vec<String>,

    #[arg(long, value_enum, default_value_t)]
    pub flavor: FlavorArg,

    /// Extra scan directions: a count of sampled unit vectors or a JSON file.
    #[arg(long)]
    pub directions: Option<String>,

    /// Degree of the grid linear programs.
    #[arg(long)]
    pub grid_degree: Option<usize>,

    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,

    /// Report path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// A count of sampled unit vectors or a JSON file of vectors.
    #[arg(long)]
    pub directions: String,

    /// Add the coordinate axes to the direction set.
    #[arg(long)]
    pub include_axes: bool,

    #[arg(long, value_enum, default_value_t)]
    pub flavor: FlavorArg,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KappaArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// `x=LO:HI:COUNT,t=LO:HI:COUNT`; points vary along the first axis.
    #[arg(long)]
    pub field: String,

    /// Degree of the grid linear programs in two or more variables.
    #[arg(long)]
    pub grid_degree: Option<usize>,

    /// Also average over spheres of this radius around each field point.
    #[arg(long)]
    pub sphere_radius: Option<String>,

    #[arg(long, default_value_t = 16)]
    pub sphere_nodes: usize,

    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Curve file, or `catalog:NAME` (optionally `catalog:NAME:A`).
    #[arg(long)]
    pub curve: String,

    /// Moments (or a measure definition) on the parameter line.
    #[arg(long)]
    pub sigma: PathBuf,

    #[arg(long)]
    pub mode: Option<String>,

    /// Degree of the curve moments; the line needs this times the largest
    /// component degree.
    #[arg(long)]
    pub degree: Option<usize>,

    #[arg(long, default_value_t = 2)]
    pub weight_exponent: u32,

    #[arg(long, value_enum, default_value_t)]
    pub flavor: FlavorArg,

    #[arg(long)]
    pub out: Option<PathBuf>,
}
