use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use toeplitz_kreiss::analysis::{GridSpec, ResolventMode, SpectrumModel};
use toeplitz_kreiss::symbols::{parse_complex, BuildMode, LaurentSymbol};

/// Power bounds and Kreiss-type resolvent conditions of conjugated Toeplitz
/// operators.
#[derive(Parser, Debug, Serialize)]
#[command(name = "tk", version)]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Size of the worker pool.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub threads: Option<usize>,

    /// Artifact destination; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    /// Artifact format. Defaults to csv for `sweep` and `stability`, json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Leave run-environment fields (timestamp, thread count, output path)
    /// out of the artifact so runs compare byte-for-byte.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Operator construction.
    #[command(subcommand)]
    Op(OpCommand),
    /// Check one inequality and print a verdict line per check.
    Verify(VerifyArgs),
    /// Growth-rate sweep over |beta| = 1 - 2^-k with fitted slopes.
    Sweep(SweepArgs),
    /// max_n ||A^n|| for n <= n_max.
    PowerBound(PowerBoundArgs),
    /// sup dist(lambda, S) ||(lambda - A)^-1|| over |lambda| > 1.
    Resolvent(ResolventArgs),
    /// Kreiss constant, optionally with the Hille-Yosida constant.
    Kreiss(KreissArgs),
    /// Propagated error of u_n = B u_{n-1} + b_n.
    Stability(StabilityArgs),
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "action", rename_all = "kebab-case")]
pub enum OpCommand {
    /// Write an N x N finite section as operator JSON.
    Build {
        #[command(flatten)]
        #[serde(flatten)]
        op: OperatorArgs,
        #[arg(long)]
        dim: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    ConjShift,
    RealPart,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Auto,
    FiniteSection,
    ClosedForm,
}

impl ModeArg {
    pub fn build(self) -> BuildMode {
        match self {
            ModeArg::ClosedForm => BuildMode::ClosedForm,
            _ => BuildMode::FiniteSection,
        }
    }

    pub fn resolvent(self) -> ResolventMode {
        match self {
            ModeArg::Auto => ResolventMode::Auto,
            ModeArg::FiniteSection => ResolventMode::FiniteSection,
            ModeArg::ClosedForm => ResolventMode::ClosedForm,
        }
    }
}

/// Operator source: a matrix file, or a family with its parameter.
#[derive(Args, Debug, Clone, Serialize)]
pub struct OperatorArgs {
    /// Operator JSON file.
    #[arg(long, conflicts_with_all = ["family", "beta", "f", "g"])]
    pub matrix: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,

    /// Conjugator ratio as RE,IM.
    #[arg(long, value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: Option<Complex64>,

    /// Custom f in the `k:re,im;…` grammar; defaults to the backward shift `-1:1,0`.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,

    /// Custom analytic g in the `k:re,im;…` grammar.
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,

    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Grid size as RADIALxANGULAR, e.g. 60x256.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<(usize, usize)>,

    #[arg(long, default_value_t = 1e-4)]
    pub refine_tol: f64,

    #[arg(long, default_value_t = 6)]
    pub max_refine: usize,
}

impl GridArgs {
    pub fn spec(&self, default: (usize, usize)) -> GridSpec {
        let (r, a) = self.grid.unwrap_or(default);
        GridSpec::logarithmic(r, a).with_refinement(self.refine_tol, self.max_refine)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// 3.1, 3.2, 3.3, prop2.2, prop1.1, er or lem6.1.
    #[arg(long)]
    pub theorem: String,

    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,

    #[arg(long, default_value_t = 512)]
    pub dim: usize,

    #[arg(long, default_value_t = 64)]
    pub n_max: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,

    /// Point set E for `er`, as `re,im;re,im;…`. Defaults to {-1, 1}.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,

    #[arg(long, default_value_t = 1e-10)]
    pub norm_tol: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub m_tol: f64,

    #[arg(long, default_value_t = 1e-2)]
    pub p_tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    /// 3.1 (conjugated shift) or 3.2 (real part).
    #[arg(long)]
    pub cor: String,

    /// Inclusive range LO..HI of k.
    #[arg(long, value_parser = parse_range, default_value = "2..8")]
    pub k_range: (u32, u32),

    /// Argument of beta in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phase: f64,

    #[arg(long, default_value_t = 64)]
    pub n_max: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,

    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,

    /// N is the smallest dimension with |beta|^N below this.
    #[arg(long, default_value_t = 1e-8)]
    pub tail_target: f64,

    #[arg(long, default_value_t = 64)]
    pub min_dim: usize,

    #[arg(long, default_value_t = 8192)]
    pub max_dim: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PowerBoundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,

    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    #[arg(long, default_value_t = 64)]
    pub n_max: usize,

    #[arg(long, default_value_t = 1e-10)]
    pub norm_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct SpectrumArg(pub SpectrumModel);

#[derive(Args, Debug, Serialize)]
pub struct ResolventArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,

    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    /// disk, interval, endpoints, or points:re,im;re,im;…
    #[arg(long, value_parser = parse_spectrum, default_value = "disk")]
    pub spectrum: SpectrumArg,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct KreissArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,

    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    /// Also compute the Hille-Yosida constant up to this resolvent power.
    #[arg(long)]
    pub hy_n_max: Option<usize>,

    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForcingArg {
    Zero,
    Seeded,
}

#[derive(Args, Debug, Serialize)]
pub struct StabilityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub op: OperatorArgs,

    #[arg(long, default_value_t = 64)]
    pub dim: usize,

    /// Perturbation v0 as a JSON array of [re, im] pairs.
    #[arg(long, conflicts_with = "perturb")]
    pub v0: Option<PathBuf>,

    /// Seeded perturbation of this norm.
    #[arg(long)]
    pub perturb: Option<f64>,

    #[arg(long)]
    pub steps: usize,

    #[arg(long, value_enum, default_value_t = ForcingArg::Seeded)]
    pub forcing: ForcingArg,

    /// Entries of seeded forcing terms are uniform in [-scale, scale)^2.
    #[arg(long, default_value_t = 1.0)]
    pub forcing_scale: f64,
}

fn parse_beta(s: &str) -> Result<Complex64, String> {
    parse_complex(s).ok_or_else(|| format!("expected RE,IM, got `{s}`"))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (r, a) = s.split_once('x').ok_or_else(|| format!("expected RADIALxANGULAR, got `{s}`"))?;
    let r: usize = r.trim().parse().map_err(|_| format!("bad radial count `{r}`"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad angular count `{a}`"))?;
    if r == 0 || a == 0 {
        return Err("grid sizes must be positive".into());
    }
    Ok((r, a))
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad bound `{lo}`"))?;
    let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| format!("bad bound `{hi}`"))?;
    Ok((lo, hi))
}

pub fn parse_points(s: &str) -> Result<Vec<Complex64>, String> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_complex(t).ok_or_else(|| format!("bad point `{}`", t.trim())))
        .collect()
}

fn parse_spectrum(s: &str) -> Result<SpectrumArg, String> {
    let model = match s {
        "disk" => SpectrumModel::UnitDisk,
        "interval" => SpectrumModel::Interval,
        "endpoints" => SpectrumModel::endpoints(),
        other => match other.strip_prefix("points:") {
            Some(list) => SpectrumModel::FinitePoints(parse_points(list)?),
            None => return Err(format!("unknown spectrum `{other}`")),
        },
    };
    Ok(SpectrumArg(model))
}

pub fn parse_symbol(s: &str) -> toeplitz_kreiss::Result<LaurentSymbol> {
    s.parse()
}
