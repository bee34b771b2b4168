//! `approx`: runs convergence experiments and exports sample layouts and
//! weighted curves as CSV/JSON.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gsr_core::experiment::{
    default_curve_grid, export_points, export_weighted_curve, rows_to_csv, run_experiment,
    write_atomic, write_report, OutputFormat,
};
use gsr_core::{Algorithm, ApproximationParams, Error, ExperimentSpec, MaternKernel};

#[derive(Parser)]
#[command(name = "approx", version, about = "Sampling recovery in Gaussian Sobolev spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence table for the truncated trigonometric interpolant.
    Trig {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trig: TrigArgs,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Convergence table for the piecewise spline smoother.
    Spline {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        spline: SplineArgs,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Sample locations used by either algorithm (CSV: algorithm,n,point).
    Points {
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trig: TrigArgs,
        #[command(flatten)]
        spline: SplineArgs,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted approximant and weighted truth on a grid
    /// (CSV: algorithm,n,x,weighted_approx,weighted_truth).
    Curve {
        #[arg(long, value_parser = parse_algorithm)]
        algo: Algorithm,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        trig: TrigArgs,
        #[command(flatten)]
        spline: SplineArgs,
        /// Grid as `lo,hi,count`; defaults to 2001 points on [-12, 12].
        #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Test function: abs, abs3, abs5, poly2, sin, gauss_bump.
    #[arg(long = "fn")]
    function: String,
    /// Error norm exponent.
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    /// Sobolev integrability exponent.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Assumed smoothness. Sets the cutoff T (trig); defaults to the kernel's
    /// space order gamma + 1/2 (spline).
    #[arg(long)]
    alpha: Option<u32>,
    /// Defaults to the midpoint (q - p) / (2pq).
    #[arg(long)]
    eps: Option<f64>,
    /// Refine the error quadrature this many times.
    #[arg(long, default_value_t = 0)]
    refine: u32,
}

#[derive(Args)]
struct TrigArgs {
    /// Choose T with max(ln ln n, 1) in place of alpha.
    #[arg(long)]
    alpha_free: bool,
    /// Sample counts, e.g. 17,33,65.
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
}

#[derive(Args)]
struct SplineArgs {
    /// Matérn order: 0.5, 1.5, 2.5 or 3.5.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    length_scale: f64,
    /// Levels, e.g. 2,3,4 (n = 2(2^m - 1)).
    #[arg(long, value_delimiter = ',')]
    m: Vec<u64>,
}

#[derive(Args)]
struct ReportOutput {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: OutputFormat,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [lo, hi, count] = parts[..] else {
        return Err("expected lo,hi,count".into());
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    let count: usize = count.trim().parse().map_err(|e| format!("{e}"))?;
    if count < 2 || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err("need lo < hi and at least 2 points".into());
    }
    Ok(Grid(
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    ))
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) if e.is_numerical() => 3,
            Failure::Core(Error::Io(_) | Error::Json(_)) => 1,
            Failure::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Core(e) => write!(f, "{e}"),
        }
    }
}

fn trig_spec(common: &Common, trig: &TrigArgs) -> Result<ExperimentSpec, Failure> {
    if trig.n.is_empty() {
        return Err(Failure::Usage("--n is required for the trig algorithm".into()));
    }
    let alpha = match (common.alpha, trig.alpha_free) {
        (Some(a), _) => a,
        // α only feeds the cutoff, which the α-free rule replaces
        (None, true) => 1,
        (None, false) => return Err(Failure::Usage("--alpha is required unless --alpha-free".into())),
    };
    let params = ApproximationParams::new(common.p, common.q, alpha, common.eps)?;
    let mut spec = ExperimentSpec::trig(&common.function, params, trig.n.clone());
    spec.alpha_free = trig.alpha_free;
    spec.quadrature_refinement = common.refine;
    Ok(spec)
}

fn spline_spec(common: &Common, spline: &SplineArgs) -> Result<ExperimentSpec, Failure> {
    if spline.m.is_empty() {
        return Err(Failure::Usage("--m is required for the spline algorithm".into()));
    }
    let gamma = spline
        .gamma
        .ok_or_else(|| Failure::Usage("--gamma is required for the spline algorithm".into()))?;
    let kernel = MaternKernel::new(gamma, spline.length_scale)?;
    let alpha = common.alpha.unwrap_or(kernel.space_order());
    let params = ApproximationParams::new(common.p, common.q, alpha, common.eps)?;
    let mut spec = ExperimentSpec::spline(&common.function, params, kernel, spline.m.clone());
    spec.quadrature_refinement = common.refine;
    Ok(spec)
}

fn export_spec(algo: Algorithm, common: &Common, trig: &TrigArgs, spline: &SplineArgs) -> Result<ExperimentSpec, Failure> {
    match algo {
        Algorithm::Trig => trig_spec(common, trig),
        Algorithm::Spline => spline_spec(common, spline),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Trig { common, trig, output } => {
            let report = run_experiment(&trig_spec(&common, &trig)?)?;
            write_report(&report, &output.out, output.format)?;
        }
        Command::Spline { common, spline, output } => {
            let report = run_experiment(&spline_spec(&common, &spline)?)?;
            write_report(&report, &output.out, output.format)?;
        }
        Command::Points { algo, common, trig, spline, out } => {
            let rows = export_points(&export_spec(algo, &common, &trig, &spline)?)?;
            write_atomic(&out, &rows_to_csv(&rows)?)?;
        }
        Command::Curve { algo, common, trig, spline, grid, out } => {
            let spec = export_spec(algo, &common, &trig, &spline)?;
            let grid = grid.map_or_else(default_curve_grid, |g| g.0);
            let rows = export_weighted_curve(&spec, &grid)?;
            write_atomic(&out, &rows_to_csv(&rows)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("approx: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
