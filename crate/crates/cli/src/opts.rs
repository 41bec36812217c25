//! Flag parsing, config-file handling, and the resolved run configuration.
//!
//! A plain-text `key=value` config file can predefine any flag; explicit
//! flags take precedence. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use catdip::QuadratureRule;

#[derive(Parser)]
#[command(
    name = "catdip",
    version,
    about = "Energy dips of Schrödinger cat states built from translated thermal modes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Emit normalized energy curves over the separation sweep
    Curve(RunArgs),
    /// Report dip position, depth, and opposing slope per particle number
    Dip(RunArgs),
    /// Scaling sweep across particle numbers with a log-log position fit
    Sweep(RunArgs),
    /// Run the self-verification suite
    Verify(RunArgs),
}

#[derive(Args, Default)]
pub struct RunArgs {
    /// Mean particle numbers, comma separated
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Option<Vec<f64>>,
    /// Mass-distribution width
    #[arg(long)]
    pub w0: Option<f64>,
    /// Field mass in natural units
    #[arg(long)]
    pub mass: Option<f64>,
    /// Sweep bound for the normalized separation 2z/w0
    #[arg(long = "zmax-norm")]
    pub zmax_norm: Option<f64>,
    /// Samples per curve
    #[arg(long)]
    pub steps: Option<usize>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value config file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Wave-grid node count
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Wave-grid half width (defaults to 24/w0)
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Quadrature rule
    #[arg(long, value_enum)]
    pub quadrature: Option<QuadArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuadArg {
    Trapezoid,
    #[value(name = "gauss-legendre")]
    GaussLegendre,
}

impl From<QuadArg> for QuadratureRule {
    fn from(q: QuadArg) -> Self {
        match q {
            QuadArg::Trapezoid => QuadratureRule::Trapezoid,
            QuadArg::GaussLegendre => QuadratureRule::GaussLegendre,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n_values: Vec<f64>,
    pub w0: f64,
    pub mass: f64,
    pub zmax_norm: f64,
    pub steps: usize,
    pub format: OutFormat,
    pub out: Option<PathBuf>,
    pub grid_points: usize,
    pub kmax: f64,
    pub rule: QuadratureRule,
}

/// Usage-level error: reported on stderr with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn resolve(args: &RunArgs) -> Result<RunConfig, UsageError> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => RunArgs::default(),
    };
    let n_values = args
        .n
        .clone()
        .or(file.n)
        .unwrap_or_else(|| vec![100.0, 1000.0, 10_000.0]);
    let w0 = args.w0.or(file.w0).unwrap_or(1.0);
    let mass = args.mass.or(file.mass).unwrap_or(0.0);
    let zmax_norm = args.zmax_norm.or(file.zmax_norm).unwrap_or(3.0);
    let steps = args.steps.or(file.steps).unwrap_or(601);
    let format = args.format.or(file.format).unwrap_or(OutFormat::Csv);
    let out = args.out.clone().or(file.out);
    let grid_points = args
        .grid_points
        .or(file.grid_points)
        .unwrap_or(catdip::grid::DEFAULT_GRID_POINTS);
    let kmax = args
        .kmax
        .or(file.kmax)
        .unwrap_or(catdip::grid::DEFAULT_KMAX_FACTOR / w0);
    let rule: QuadratureRule = args
        .quadrature
        .or(file.quadrature)
        .map(Into::into)
        .unwrap_or(QuadratureRule::Trapezoid);

    if n_values.is_empty() {
        return Err(UsageError("at least one particle number is required".into()));
    }
    if n_values.iter().any(|n| !n.is_finite() || *n < 0.0) {
        return Err(UsageError(
            "particle numbers must be finite and nonnegative".into(),
        ));
    }
    if !w0.is_finite() || w0 <= 0.0 {
        return Err(UsageError(format!("w0 must be positive, got {w0}")));
    }
    if !mass.is_finite() || mass < 0.0 {
        return Err(UsageError(format!("mass must be nonnegative, got {mass}")));
    }
    if !zmax_norm.is_finite() || zmax_norm <= 0.0 {
        return Err(UsageError(format!(
            "zmax-norm must be positive, got {zmax_norm}"
        )));
    }
    if steps < 2 {
        return Err(UsageError(format!("steps must be at least 2, got {steps}")));
    }
    if grid_points < 2 {
        return Err(UsageError(format!(
            "grid-points must be at least 2, got {grid_points}"
        )));
    }
    if !kmax.is_finite() || kmax <= 0.0 {
        return Err(UsageError(format!("kmax must be positive, got {kmax}")));
    }
    Ok(RunConfig {
        n_values,
        w0,
        mass,
        zmax_norm,
        steps,
        format,
        out,
        grid_points,
        kmax,
        rule,
    })
}

fn parse_config_file(path: &Path) -> Result<RunArgs, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = RunArgs::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            UsageError(format!(
                "config line {} is not key=value: {raw:?}",
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |e: String| UsageError(format!("config line {}: {e}", lineno + 1));
        match key {
            "n" => {
                let parsed: Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse::<f64>()).collect();
                out.n = Some(parsed.map_err(|e| bad(format!("bad n list: {e}")))?);
            }
            "w0" => out.w0 = Some(value.parse().map_err(|e| bad(format!("bad w0: {e}")))?),
            "mass" => out.mass = Some(value.parse().map_err(|e| bad(format!("bad mass: {e}")))?),
            "zmax_norm" => {
                out.zmax_norm =
                    Some(value.parse().map_err(|e| bad(format!("bad zmax_norm: {e}")))?)
            }
            "steps" => {
                out.steps = Some(value.parse().map_err(|e| bad(format!("bad steps: {e}")))?)
            }
            "format" => {
                out.format = Some(match value {
                    "csv" => OutFormat::Csv,
                    "json" => OutFormat::Json,
                    other => return Err(bad(format!("unknown format {other:?}"))),
                })
            }
            "out" => out.out = Some(PathBuf::from(value)),
            "grid_points" => {
                out.grid_points = Some(
                    value
                        .parse()
                        .map_err(|e| bad(format!("bad grid_points: {e}")))?,
                )
            }
            "kmax" => out.kmax = Some(value.parse().map_err(|e| bad(format!("bad kmax: {e}")))?),
            "quadrature" => {
                out.quadrature = Some(match value {
                    "trapezoid" => QuadArg::Trapezoid,
                    "gauss-legendre" => QuadArg::GaussLegendre,
                    other => return Err(bad(format!("unknown quadrature {other:?}"))),
                })
            }
            other => {
                return Err(UsageError(format!(
                    "unknown config key {other:?} on line {}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}
