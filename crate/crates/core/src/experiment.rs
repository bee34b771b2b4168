//! Convergence experiments and data export.
//!
//! An [`ExperimentSpec`] names an algorithm, a corpus function and a list of
//! sizes (`n` for the trigonometric algorithm, level `m` for the spline one).
//! [`run_experiment`] builds one approximant per size, measures its `L^p_ρ`
//! error and fits the log–log rate.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus;
use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::metrics::{fit_rate, weighted_lp_error, QuadratureConfig, WeightedApproximant};
use crate::special::MaternKernel;
use crate::spline::{allocate_points, interval_points, SplineApproximant, MAX_LEVEL};
use crate::trig::{
    log_log_floor_one, select_t, select_t_alpha_free, trig_nodes, ApproximationParams,
    TrigInterpolant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Trig,
    Spline,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Trig => "trig",
            Algorithm::Spline => "spline",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trig" => Ok(Algorithm::Trig),
            "spline" => Ok(Algorithm::Spline),
            other => Err(Error::invalid("algorithm", format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid("format", format!("unknown format `{other}`"))),
        }
    }
}

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub params: ApproximationParams,
    pub function_id: String,
    /// Sample counts `n` (trig) or levels `m` (spline), strictly increasing.
    pub sizes: Vec<u64>,
    /// Required for the spline algorithm.
    pub kernel: Option<MaternKernel>,
    /// Trig only: choose `T` with `γ(n) = max(ln ln n, 1)` instead of `α`.
    pub alpha_free: bool,
    /// Number of times the default error quadrature is refined (each doubles
    /// panels and nodes per panel).
    pub quadrature_refinement: u32,
}

impl ExperimentSpec {
    pub fn trig(function_id: &str, params: ApproximationParams, sizes: Vec<u64>) -> Self {
        ExperimentSpec {
            algorithm: Algorithm::Trig,
            params,
            function_id: function_id.to_string(),
            sizes,
            kernel: None,
            alpha_free: false,
            quadrature_refinement: 0,
        }
    }

    pub fn spline(
        function_id: &str,
        params: ApproximationParams,
        kernel: MaternKernel,
        levels: Vec<u64>,
    ) -> Self {
        ExperimentSpec {
            algorithm: Algorithm::Spline,
            params,
            function_id: function_id.to_string(),
            sizes: levels,
            kernel: Some(kernel),
            alpha_free: false,
            quadrature_refinement: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::invalid("sizes", "no sizes given"));
        }
        if self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sizes", "must be strictly increasing"));
        }
        match self.algorithm {
            Algorithm::Trig => {
                if self.sizes[0] < 2 {
                    return Err(Error::invalid("n", "trigonometric sizes must be at least 2"));
                }
            }
            Algorithm::Spline => {
                let kernel = self
                    .kernel
                    .ok_or_else(|| Error::invalid("kernel", "spline experiments need a kernel"))?;
                if self.sizes[0] < 1 || *self.sizes.last().unwrap() > MAX_LEVEL as u64 {
                    return Err(Error::invalid("m", format!("levels must lie in 1..={MAX_LEVEL}")));
                }
                if self.params.alpha() > kernel.space_order() {
                    return Err(Error::invalid(
                        "alpha",
                        format!(
                            "{} exceeds the kernel space order {}",
                            self.params.alpha(),
                            kernel.space_order()
                        ),
                    ));
                }
                if self.alpha_free {
                    return Err(Error::invalid("alpha_free", "only applies to trig"));
                }
            }
        }
        corpus::lookup(&self.function_id)?;
        Ok(())
    }

    /// Cutoff `T` (trig) or level `m` (spline) used for `size`.
    pub fn cutoff(&self, size: u64) -> Result<f64> {
        match self.algorithm {
            Algorithm::Trig if self.alpha_free => {
                select_t_alpha_free(size, log_log_floor_one, &self.params)
            }
            Algorithm::Trig => select_t(size, &self.params),
            Algorithm::Spline => Ok(size as f64),
        }
    }

    /// Number of function values consumed at `size`.
    pub fn sample_count(&self, size: u64) -> Result<u64> {
        match self.algorithm {
            Algorithm::Trig => Ok(size),
            Algorithm::Spline => Ok(allocate_points(size as u32)?.total as u64),
        }
    }
}

/// Either algorithm's output.
#[derive(Debug, Clone)]
pub enum Approximant {
    Trig(TrigInterpolant),
    Spline(SplineApproximant),
}

impl WeightedApproximant for Approximant {
    fn support_radius(&self) -> f64 {
        match self {
            Approximant::Trig(a) => a.support_radius(),
            Approximant::Spline(a) => a.support_radius(),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Approximant::Trig(a) => a.breakpoints(),
            Approximant::Spline(a) => a.breakpoints(),
        }
    }

    fn weighted_value(&self, x: f64, p: f64) -> f64 {
        match self {
            Approximant::Trig(a) => a.weighted_value(x, p),
            Approximant::Spline(a) => a.weighted_value(x, p),
        }
    }
}

/// Builds the approximant of `f` for one size of `spec`.
pub fn build_approximant(spec: &ExperimentSpec, f: &TestFunction, size: u64) -> Result<Approximant> {
    let p = spec.params.p();
    match spec.algorithm {
        Algorithm::Trig => {
            let t = spec.cutoff(size)?;
            Ok(Approximant::Trig(TrigInterpolant::build(f, size as usize, t, p)?))
        }
        Algorithm::Spline => {
            let kernel = spec
                .kernel
                .ok_or_else(|| Error::invalid("kernel", "spline experiments need a kernel"))?;
            Ok(Approximant::Spline(SplineApproximant::build(
                f,
                size as u32,
                kernel,
                spec.params.alpha(),
                p,
            )?))
        }
    }
}

/// Error quadrature matched to an approximant's support and breakpoints.
///
/// For the trigonometric interpolant the panels are also cut at the nodes:
/// the error vanishes there and typically keeps its sign in between, so each
/// panel sees a smooth `|e|^p`.
pub fn error_quadrature(approx: &Approximant, refinement: u32) -> QuadratureConfig {
    let mut cuts = approx.breakpoints();
    if let Approximant::Trig(a) = approx {
        cuts.extend(a.nodes());
    }
    let mut cfg = QuadratureConfig::new(approx.support_radius(), cuts);
    for _ in 0..refinement {
        cfg = cfg.refined();
    }
    cfg
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Function values used.
    pub n: u64,
    /// `T` for trig, `m` for spline.
    pub cutoff: f64,
    pub error: f64,
}

/// Errors per size and the fitted log–log rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub algorithm: Algorithm,
    pub function_id: String,
    pub params: ApproximationParams,
    pub kernel: Option<MaternKernel>,
    pub alpha_free: bool,
    pub rows: Vec<ReportRow>,
    /// `None` with fewer than three rows.
    pub fitted_rate: Option<f64>,
}

impl ConvergenceReport {
    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    /// Rate fitted on the first `len` rows, when defined.
    pub fn running_rate(&self, len: usize) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.rows[..len]
            .iter()
            .map(|r| (r.n as f64, r.error))
            .collect();
        fit_rate(&pts).ok()
    }
}

/// Builds, measures and fits. Rows are computed in parallel; each row is a
/// deterministic function of `spec`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    let f = corpus::lookup(&spec.function_id)?;
    let p = spec.params.p();
    let rows = spec
        .sizes
        .par_iter()
        .map(|&size| {
            let approx = build_approximant(spec, &f, size)?;
            let cfg = error_quadrature(&approx, spec.quadrature_refinement);
            Ok(ReportRow {
                n: spec.sample_count(size)?,
                cutoff: spec.cutoff(size)?,
                error: weighted_lp_error(&f, &approx, p, &cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ConvergenceReport {
        algorithm: spec.algorithm,
        function_id: spec.function_id.clone(),
        params: spec.params,
        kernel: spec.kernel,
        alpha_free: spec.alpha_free,
        rows,
        fitted_rate: None,
    };
    report.fitted_rate = report.running_rate(report.rows.len());
    Ok(report)
}

#[derive(Debug, Serialize)]
struct CsvReportRow<'a> {
    algorithm: &'a str,
    n: u64,
    #[serde(rename = "param_T_or_m")]
    param_t_or_m: f64,
    error: f64,
    rate_running: Option<f64>,
}

/// `algorithm,n,param_T_or_m,error,rate_running`; the running rate is empty
/// until three rows are available.
pub fn report_to_csv(report: &ConvergenceReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (i, row) in report.rows.iter().enumerate() {
        w.serialize(CsvReportRow {
            algorithm: report.algorithm.as_str(),
            n: row.n,
            param_t_or_m: row.cutoff,
            error: row.error,
            rate_running: report.running_rate(i + 1),
        })
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn report_to_json(report: &ConvergenceReport) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(report)?;
    out.push(b'\n');
    Ok(out)
}

pub fn report_from_json(bytes: &[u8]) -> Result<ConvergenceReport> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn write_report(report: &ConvergenceReport, path: &Path, format: OutputFormat) -> Result<()> {
    let bytes = match format {
        OutputFormat::Csv => report_to_csv(report)?,
        OutputFormat::Json => report_to_json(report)?,
    };
    write_atomic(path, &bytes)
}

/// Writes to a temporary file in the target directory, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// One sample location of an algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointRow {
    pub algorithm: Algorithm,
    pub n: u64,
    pub point: f64,
}

/// Sample locations for every size of `spec`: trig nodes on `[-T, T]`, or the
/// union of interval points over `0 < |k| ≤ m` in increasing order.
pub fn export_points(spec: &ExperimentSpec) -> Result<Vec<PointRow>> {
    spec.validate()?;
    let mut rows = Vec::new();
    for &size in &spec.sizes {
        let n = spec.sample_count(size)?;
        let points = match spec.algorithm {
            Algorithm::Trig => trig_nodes(size as usize, spec.cutoff(size)?),
            Algorithm::Spline => {
                let alloc = allocate_points(size as u32)?;
                let m = size as i32;
                let mut pts = Vec::with_capacity(alloc.total);
                for k in (-m..=-1).chain(1..=m) {
                    let nu = alloc.per_interval[k.unsigned_abs() as usize - 1];
                    pts.extend(interval_points(nu, k)?);
                }
                pts
            }
        };
        rows.extend(points.into_iter().map(|point| PointRow {
            algorithm: spec.algorithm,
            n,
            point,
        }));
    }
    Ok(rows)
}

/// Weighted approximant and weighted truth at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub algorithm: Algorithm,
    pub n: u64,
    pub x: f64,
    /// `ρ(x)^{1/p} A_n(f)(x)`.
    pub weighted_approx: f64,
    /// `ρ(x)^{1/p} f(x)`.
    pub weighted_truth: f64,
}

/// 2001 equispaced points on `[-12, 12]`.
pub fn default_curve_grid() -> Vec<f64> {
    (0..=2000).map(|i| -12.0 + 24.0 * i as f64 / 2000.0).collect()
}

pub fn export_weighted_curve(spec: &ExperimentSpec, grid: &[f64]) -> Result<Vec<CurveRow>> {
    spec.validate()?;
    if let Some(x) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::invalid("grid", format!("non-finite grid point {x}")));
    }
    let f = corpus::lookup(&spec.function_id)?;
    let p = spec.params.p();
    let mut rows = Vec::with_capacity(grid.len() * spec.sizes.len());
    for &size in &spec.sizes {
        let approx = build_approximant(spec, &f, size)?;
        let n = spec.sample_count(size)?;
        rows.extend(grid.iter().map(|&x| CurveRow {
            algorithm: spec.algorithm,
            n,
            x,
            weighted_approx: approx.weighted_value(x, p),
            weighted_truth: crate::metrics::weighted_sample(f.derivative(0, x).unwrap_or(f64::NAN), x, p),
        }));
    }
    Ok(rows)
}

/// Serializes any row type as CSV with a header line.
pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}
