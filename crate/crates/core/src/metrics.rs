//! Error measurement: Gaussian-weighted `L^p` errors, Gaussian Sobolev norms,
//! the decay-norm diagnostic, the closed-form tail bound and log–log rate fits.
//!
//! All integrals use composite Gauss–Legendre panels whose boundaries include
//! the approximant's breakpoints (cutoffs, interval joins) and the kinks of `f`,
//! so every panel integrand is smooth.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::quadrature::{panel_edges, GaussLegendre};
use crate::special::{binomial, density_root_derivative, hermite_unchecked, ln_gaussian_density};
use crate::trig::ApproximationParams;

/// Default maximal panel width.
pub const DEFAULT_PANEL_WIDTH: f64 = 0.25;
/// Default Gauss–Legendre order per panel.
pub const DEFAULT_NODES_PER_PANEL: usize = 64;
/// Length of the pure-`f` tail integrated beyond the truncation radius.
pub const DEFAULT_TAIL_LENGTH: f64 = 20.0;

/// Composite quadrature layout on `[-R - L, R + L]`.
///
/// `[-R, R]` is split into `panel_count` panels (plus one extra cut per interior
/// breakpoint); each tail `[R, R + L]` gets `tail_panel_count` panels.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    pub panel_count: usize,
    pub nodes_per_panel: usize,
    pub truncation_radius: f64,
    pub breakpoints: Vec<f64>,
    pub tail_length: f64,
    pub tail_panel_count: usize,
}

impl QuadratureConfig {
    /// Default resolution (panels no wider than 0.25, 64 nodes each) on `[-R, R]`.
    pub fn new(truncation_radius: f64, breakpoints: impl IntoIterator<Item = f64>) -> Self {
        let radius = truncation_radius.max(0.0);
        let mut breakpoints: Vec<f64> = breakpoints.into_iter().collect();
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        QuadratureConfig {
            panel_count: ((2.0 * radius / DEFAULT_PANEL_WIDTH).ceil() as usize).max(1),
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            truncation_radius: radius,
            breakpoints,
            tail_length: DEFAULT_TAIL_LENGTH,
            tail_panel_count: (DEFAULT_TAIL_LENGTH / DEFAULT_PANEL_WIDTH).ceil() as usize,
        }
    }

    /// Layout for whole-line integrals of rapidly decaying integrands.
    pub fn whole_line() -> Self {
        Self::new(10.0, [])
    }

    /// Doubles panel counts and nodes per panel.
    pub fn refined(&self) -> Self {
        QuadratureConfig {
            panel_count: self.panel_count * 2,
            nodes_per_panel: self.nodes_per_panel * 2,
            tail_panel_count: self.tail_panel_count * 2,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.panel_count == 0 || self.nodes_per_panel == 0 || self.tail_panel_count == 0 {
            return Err(Error::invalid("cfg", "panel and node counts must be positive"));
        }
        if !(self.truncation_radius >= 0.0) || !(self.tail_length >= 0.0) {
            return Err(Error::invalid("cfg", "radius and tail length must be non-negative"));
        }
        Ok(())
    }

    /// Panel edges covering `[-R - L, R + L]`, cut at breakpoints and `extra` points.
    pub fn edges(&self, extra: &[f64]) -> Vec<f64> {
        let r = self.truncation_radius;
        let l = self.tail_length;
        let mut cuts: Vec<f64> = self.breakpoints.iter().chain(extra).copied().collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut edges = Vec::new();
        let tail_width = if self.tail_panel_count > 0 {
            l / self.tail_panel_count as f64
        } else {
            l
        };
        if l > 0.0 {
            edges.extend(panel_edges(-r - l, -r, &cuts, tail_width));
        }
        if r > 0.0 {
            let main = panel_edges(-r, r, &cuts, 2.0 * r / self.panel_count as f64);
            if edges.is_empty() {
                edges.extend(main);
            } else {
                edges.extend(main.into_iter().skip(1));
            }
        }
        if l > 0.0 {
            let right = panel_edges(r, r + l, &cuts, tail_width);
            if edges.is_empty() {
                edges.extend(right);
            } else {
                edges.extend(right.into_iter().skip(1));
            }
        }
        edges
    }

    /// `∫ integrand` over `[-R - L, R + L]`. Panels are evaluated in parallel and
    /// summed in a fixed order, so results are run-to-run identical.
    pub fn integrate<F>(&self, extra_cuts: &[f64], integrand: F) -> Result<f64>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.validate()?;
        let rule = GaussLegendre::new(self.nodes_per_panel);
        let edges = self.edges(extra_cuts);
        let parts: Vec<f64> = edges
            .par_windows(2)
            .map(|w| rule.integrate(w[0], w[1], &integrand))
            .collect();
        Ok(pairwise_sum(&parts))
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// An approximant `A` that vanishes outside `[-support_radius, support_radius]`
/// and can report `ρ(x)^{1/p} A(x)` without overflow.
pub trait WeightedApproximant: Sync {
    fn support_radius(&self) -> f64;

    /// Points where the approximant is allowed to be non-smooth.
    fn breakpoints(&self) -> Vec<f64>;

    /// `ρ(x)^{1/p} · A(x)`.
    fn weighted_value(&self, x: f64, p: f64) -> f64;
}

/// Adapter for an approximant given by plain values `A(x)` on `[-R, R]`.
pub struct FnApproximant<F> {
    pub radius: f64,
    pub value: F,
}

impl<F: Fn(f64) -> f64 + Sync> WeightedApproximant for FnApproximant<F> {
    fn support_radius(&self) -> f64 {
        self.radius
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.radius, self.radius]
    }

    fn weighted_value(&self, x: f64, p: f64) -> f64 {
        if x.abs() > self.radius {
            0.0
        } else {
            (self.value)(x) * (ln_gaussian_density(x) / p).exp()
        }
    }
}

/// `f(x) ρ(x)^{1/p}` computed without forming `ρ^{1/p}` separately when `f` is large.
pub(crate) fn weighted_sample(fx: f64, x: f64, p: f64) -> f64 {
    fx * (ln_gaussian_density(x) / p).exp()
}

/// `(∫ |f - A|^p ρ)^{1/p}` over the real line.
///
/// The integrand is evaluated as `|f ρ^{1/p} - ρ^{1/p} A|^p`. Beyond the
/// truncation radius only `f` contributes, integrated over `cfg.tail_length`.
pub fn weighted_lp_error(
    f: &TestFunction,
    approx: &dyn WeightedApproximant,
    p: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid("p", format!("{p} must be at least 1")));
    }
    let support = approx.support_radius();
    if cfg.truncation_radius < support * (1.0 - 1e-14) {
        return Err(Error::invalid(
            "cfg.truncation_radius",
            format!(
                "{} truncates the approximant support {support}",
                cfg.truncation_radius
            ),
        ));
    }
    let mut cuts: Vec<f64> = f.kinks().to_vec();
    cuts.extend(approx.breakpoints());
    let integral = cfg.integrate(&cuts, |x| {
        let fx = f.derivative(0, x).unwrap_or(f64::NAN);
        let diff = weighted_sample(fx, x, p) - approx.weighted_value(x, p);
        diff.abs().powf(p)
    })?;
    Ok(integral.max(0.0).powf(1.0 / p))
}

/// `(∫_{|x| > T} |f|^p ρ)^{1/p}`, the part of the error no truncated approximant can recover.
pub fn tail_lp_norm(f: &TestFunction, p: f64, cutoff: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let tail_cfg = QuadratureConfig {
        truncation_radius: cutoff,
        ..cfg.clone()
    };
    let cuts = f.kinks().to_vec();
    let integral = tail_cfg.integrate(&cuts, |x| {
        if x.abs() <= cutoff {
            0.0
        } else {
            let fx = f.derivative(0, x).unwrap_or(f64::NAN);
            weighted_sample(fx, x, p).abs().powf(p)
        }
    })?;
    Ok(integral.max(0.0).powf(1.0 / p))
}

/// Gaussian Sobolev norm `(Σ_{τ ≤ α} ∫ |f^{(τ)}|^q ρ)^{1/q}`.
pub fn sobolev_norm(f: &TestFunction, alpha: usize, q: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::invalid("q", format!("{q} must be at least 1")));
    }
    f.require_order(alpha)?;
    let mut total = 0.0;
    for tau in 0..=alpha {
        total += cfg.integrate(f.kinks(), |x| {
            let d = f.derivative(tau, x).unwrap_or(f64::NAN);
            weighted_sample(d, x, q).abs().powf(q)
        })?;
    }
    Ok(total.powf(1.0 / q))
}

/// `ρ(x)^s · g^{(τ)}(x)` for `g = f ρ^{1/p}`, with the derivatives of `ρ^{1/p}`
/// expanded through normalized Hermite polynomials.
pub fn weighted_derivative(f: &TestFunction, p: f64, tau: usize, x: f64, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    let base = ((s + 1.0 / p) * ln_gaussian_density(x)).exp();
    for ell in 0..=tau {
        let fd = f.derivative(tau - ell, x)?;
        if fd == 0.0 {
            continue;
        }
        // derivative of ρ^{1/p} with the density factor stripped
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        let sqrt_fact: f64 = (1..=ell).map(|j| (j as f64).sqrt()).product();
        let poly = sign * sqrt_fact * p.powf(-(ell as f64) / 2.0) * hermite_unchecked(ell, x / p.sqrt());
        acc += binomial(tau, ell) * fd * poly;
    }
    Ok(acc * base)
}

/// `g^{(τ)}(x)` for `g = f ρ^{1/p}`.
pub fn g_derivative(f: &TestFunction, p: f64, tau: usize, x: f64) -> Result<f64> {
    let mut acc = 0.0;
    for ell in 0..=tau {
        let fd = f.derivative(tau - ell, x)?;
        if fd != 0.0 {
            acc += binomial(tau, ell) * fd * density_root_derivative(ell, p, x);
        }
    }
    Ok(acc)
}

/// Grid estimate of `sup_x max_{τ < α} |ρ^{1/q - 1/p + ε}(x) g^{(τ)}(x)|`.
///
/// Diagnostic only: a grid maximum is a lower bound for the supremum. Orders
/// beyond the derivatives `f` declares are skipped.
pub fn decay_norm_estimate(
    f: &TestFunction,
    params: &ApproximationParams,
    grid_radius: f64,
    grid_step: f64,
) -> Result<f64> {
    if !(grid_step > 0.0) {
        return Err(Error::invalid("grid_step", format!("{grid_step} must be positive")));
    }
    let p = params.p();
    let s = 1.0 / params.q() - 1.0 / p + params.epsilon();
    let max_tau = (params.alpha() as usize).saturating_sub(1).min(f.alpha_known());
    let steps = (2.0 * grid_radius / grid_step).floor() as usize;
    let mut sup: f64 = 0.0;
    for i in 0..=steps {
        let x = -grid_radius + i as f64 * grid_step;
        for tau in 0..=max_tau {
            let v = weighted_derivative(f, p, tau, x, s)?;
            sup = sup.max(v.abs());
        }
    }
    Ok(sup)
}

/// Closed-form tail bound
/// `(2 / (r p T))^{1/p} (2π)^{-r/2} e^{-r T² / 2} · decay_norm`, `r = 1/p - 1/q - ε`.
pub fn tail_bound(params: &ApproximationParams, decay_norm: f64, cutoff: f64) -> Result<f64> {
    if !(cutoff > 0.0) {
        return Err(Error::invalid("T", format!("{cutoff} must be positive")));
    }
    let p = params.p();
    let r = 1.0 / p - 1.0 / params.q() - params.epsilon();
    if !(r > 0.0) {
        return Err(Error::invalid("epsilon", format!("decay exponent {r} is not positive")));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let prefactor = (2.0 / (r * p * cutoff)).powf(1.0 / p) * two_pi.powf(-r / 2.0);
    Ok(prefactor * (-r * cutoff * cutoff / 2.0).exp() * decay_norm)
}

/// Least-squares slope of `ln(error)` against `ln(n)`.
pub fn fit_rate(rows: &[(f64, f64)]) -> Result<f64> {
    if rows.len() < 3 {
        return Err(Error::invalid("rows", format!("need at least 3 rows, got {}", rows.len())));
    }
    if let Some(&(n, e)) = rows.iter().find(|(n, e)| !(*n > 0.0) || !(*e > 0.0)) {
        return Err(Error::invalid("rows", format!("non-positive entry (n={n}, error={e})")));
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|(n, e)| (n.ln(), e.ln())).collect();
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("rows", "all n are equal"));
    }
    Ok(sxy / sxx)
}
