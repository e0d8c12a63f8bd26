use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "xorder", version, about = "Convex and star transform order comparisons for lifetime systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide the order relation between two system documents.
    Compare(CompareArgs),
    /// Classify the tail variation of a system document.
    Classify(ClassifyArgs),
    /// Export h, V or D on a grid as a two-column CSV.
    Curve(CurveArgs),
    /// Run the fixture suite.
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
pub struct Tuning {
    /// Upper end of the asymptotic line probe.
    #[arg(long = "xmax")]
    pub x_max: Option<f64>,
    /// Points in the comparison grid.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Sign tolerance on normalized V values.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub lhs: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
    /// Verdict JSON destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Writes h = Q_rhs(tail_lhs) on the comparison range.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub dist: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    #[value(name = "h")]
    H,
    #[value(name = "V")]
    V,
    #[value(name = "D")]
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    /// `F_alpha = F_base^alpha`.
    Power,
    /// `F_alpha(x) = F_base(alpha x)`.
    Scale,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum)]
    pub kind: CurveKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub lhs: Option<PathBuf>,
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyKind>,
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Row count.
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FixturesArgs {
    /// `paper` or `all`.
    #[arg(long, default_value = "paper")]
    pub suite: String,
    /// Report JSON destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub tuning: Tuning,
}
