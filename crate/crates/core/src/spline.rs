//! Interval-partitioned spline smoothing.
//!
//! `[-m, m]` is split into the unit intervals `𝕀_k = [k-1, k]` (`k ≥ 1`) and
//! `𝕀_k = [k, k+1]` (`k ≤ -1`). Interval `𝕀_{±k}` receives `ν_k = 2^{m-k}`
//! equispaced interior samples of `g = f ρ^{1/p}`, and a Matérn-kernel spline
//! smoother with `λ = ν^{-2α̃}` is fitted there independently.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::metrics::{weighted_sample, WeightedApproximant};
use crate::special::{ln_gaussian_density, MaternKernel};

/// Largest supported level `m`.
pub const MAX_LEVEL: u32 = 24;

/// Reject fits whose shifted Gram matrix has a larger condition estimate.
pub const MAX_CONDITION: f64 = 1e14;

/// Per-interval sample counts for level `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    /// `ν_1, …, ν_m`; interval `𝕀_{-k}` uses `ν_k` as well.
    pub per_interval: Vec<usize>,
    /// `2 Σ ν_k`.
    pub total: usize,
}

/// `ν_k = 2^{m-k}` for `k = 1..=m`, so `n = 2(2^m - 1)`.
pub fn allocate_points(m: u32) -> Result<Allocation> {
    if !(1..=MAX_LEVEL).contains(&m) {
        return Err(Error::invalid("m", format!("{m} outside 1..={MAX_LEVEL}")));
    }
    let per_interval: Vec<usize> = (1..=m).map(|k| 1usize << (m - k)).collect();
    let total = 2 * per_interval.iter().sum::<usize>();
    Ok(Allocation {
        per_interval,
        total,
    })
}

/// Left endpoint of `𝕀_k`.
pub fn interval_left(k: i32) -> Result<f64> {
    match k {
        0 => Err(Error::invalid("k", "interval index must be nonzero")),
        k if k > 0 => Ok((k - 1) as f64),
        k => Ok(k as f64),
    }
}

/// `left(𝕀_k) + i/(ν+1)` for `i = 1..=ν`.
pub fn interval_points(nu: usize, k: i32) -> Result<Vec<f64>> {
    if nu == 0 {
        return Err(Error::invalid("nu", "must be positive"));
    }
    let left = interval_left(k)?;
    Ok((1..=nu)
        .map(|i| left + i as f64 / (nu + 1) as f64)
        .collect())
}

/// Largest gap of [`interval_points`] counting the interval endpoints, `1/(ν+1)`.
pub fn fill_distance(nu: usize) -> f64 {
    1.0 / (nu + 1) as f64
}

/// Spline smoother `s(x) = Σ a_i K(x, x_i)` on one unit interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSmoother {
    interval_index: i32,
    points: Vec<f64>,
    coefficients: Vec<f64>,
    kernel: MaternKernel,
    lambda: f64,
}

/// Solves `(K + λI) a = values` for the Gram matrix `K` of `kernel` at `points`.
pub fn fit_interval_smoother(
    interval_index: i32,
    points: Vec<f64>,
    values: &[f64],
    kernel: MaternKernel,
    lambda: f64,
) -> Result<IntervalSmoother> {
    interval_left(interval_index)?;
    if points.is_empty() || points.len() != values.len() {
        return Err(Error::invalid(
            "samples",
            format!("{} points for {} values", points.len(), values.len()),
        ));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::invalid("lambda", format!("{lambda} must be positive")));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("points", "must be strictly increasing"));
    }
    if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid("values", format!("non-finite value {v}")));
    }

    let nu = points.len();
    let shifted = DMatrix::from_fn(nu, nu, |i, j| {
        kernel.eval(points[i], points[j]) + if i == j { lambda } else { 0.0 }
    });
    let chol = shifted
        .cholesky()
        .ok_or(Error::Singular { condition: f64::INFINITY })?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
    let condition = (hi / lo).powi(2);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Singular { condition });
    }
    let a = chol.solve(&DVector::from_column_slice(values));
    Ok(IntervalSmoother {
        interval_index,
        points,
        coefficients: a.iter().copied().collect(),
        kernel,
        lambda,
    })
}

impl IntervalSmoother {
    pub fn interval_index(&self) -> i32 {
        self.interval_index
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn kernel(&self) -> &MaternKernel {
        &self.kernel
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Kernel expansion `Σ a_i K(x, x_i)` (not restricted to the interval).
    pub fn value(&self, x: f64) -> f64 {
        self.points
            .iter()
            .zip(&self.coefficients)
            .map(|(xi, a)| a * self.kernel.eval(x, *xi))
            .sum()
    }

    /// `‖(K + λI) a - f‖`.
    pub fn residual(&self, values: &[f64]) -> f64 {
        self.points
            .iter()
            .zip(values)
            .zip(&self.coefficients)
            .map(|((x, v), a)| (self.value(*x) + self.lambda * a - v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Smoothing objective `Σ (v_i - s(x_i))² + λ aᵀ K a`.
    pub fn objective(&self, values: &[f64]) -> f64 {
        smoothing_objective(&self.kernel, &self.points, values, &self.coefficients, self.lambda)
    }
}

/// `Σ (v_i - s(x_i))² + λ aᵀ K a` for `s = Σ a_j K(·, x_j)`.
pub fn smoothing_objective(
    kernel: &MaternKernel,
    points: &[f64],
    values: &[f64],
    coefficients: &[f64],
    lambda: f64,
) -> f64 {
    let ka: Vec<f64> = points
        .iter()
        .map(|x| {
            points
                .iter()
                .zip(coefficients)
                .map(|(xj, a)| a * kernel.eval(*x, *xj))
                .sum()
        })
        .collect();
    let misfit: f64 = values.iter().zip(&ka).map(|(v, s)| (v - s).powi(2)).sum();
    let norm: f64 = coefficients.iter().zip(&ka).map(|(a, s)| a * s).sum();
    misfit + lambda * norm
}

/// Reweighted sum of per-interval spline smoothers, supported on `[-m, m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineApproximant {
    m: u32,
    p: f64,
    /// Ordered `k = -m, …, -1, 1, …, m`.
    smoothers: Vec<IntervalSmoother>,
}

/// `λ_ν = ν^{-2α}`.
pub fn regularization(nu: usize, alpha: u32) -> f64 {
    (nu as f64).powi(-2 * alpha as i32)
}

impl SplineApproximant {
    /// Fits all `2m` interval smoothers to `g = f ρ^{1/p}`, evaluating `f`
    /// exactly `2(2^m - 1)` times.
    ///
    /// `alpha` is the smoothness assumed for `f` and must not exceed the
    /// kernel's space order `γ + 1/2`; the regularization uses the kernel's order.
    pub fn build(f: &TestFunction, m: u32, kernel: MaternKernel, alpha: u32, p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::invalid("p", format!("{p} must satisfy p >= 1")));
        }
        if alpha == 0 || alpha > kernel.space_order() {
            return Err(Error::invalid(
                "alpha",
                format!(
                    "{alpha} not in 1..={} for Matérn order {}",
                    kernel.space_order(),
                    kernel.gamma()
                ),
            ));
        }
        let alloc = allocate_points(m)?;
        let m_i = m as i32;
        let indices: Vec<i32> = (-m_i..=-1).chain(1..=m_i).collect();

        // sample sequentially so instrumented call order stays deterministic
        let mut jobs = Vec::with_capacity(indices.len());
        for &k in &indices {
            let nu = alloc.per_interval[k.unsigned_abs() as usize - 1];
            let points = interval_points(nu, k)?;
            let mut values = Vec::with_capacity(nu);
            for &x in &points {
                let fx = f.value(x);
                if !fx.is_finite() {
                    return Err(Error::NonFiniteSample { x, value: fx });
                }
                values.push(weighted_sample(fx, x, p));
            }
            jobs.push((k, points, values, regularization(nu, kernel.space_order())));
        }
        let smoothers = jobs
            .into_par_iter()
            .map(|(k, points, values, lambda)| fit_interval_smoother(k, points, &values, kernel, lambda))
            .collect::<Result<Vec<_>>>()?;
        Ok(SplineApproximant { m, p, smoothers })
    }

    pub fn level(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn smoothers(&self) -> &[IntervalSmoother] {
        &self.smoothers
    }

    pub fn sample_count(&self) -> usize {
        self.smoothers.iter().map(|s| s.points.len()).sum()
    }

    /// Index of the interval owning `x`; integer breakpoints belong to the
    /// interval on their left, `-m` to `𝕀_{-m}`.
    pub fn owner(&self, x: f64) -> Option<i32> {
        let m = self.m as f64;
        if !(x.abs() <= m) {
            return None;
        }
        let c = x.ceil();
        let k = if x > 0.0 { c as i32 } else { c as i32 - 1 };
        Some(k.max(-(self.m as i32)))
    }

    fn smoother(&self, k: i32) -> &IntervalSmoother {
        let m = self.m as i32;
        let idx = if k < 0 { k + m } else { k + m - 1 };
        &self.smoothers[idx as usize]
    }

    /// `ρ(x)^{1/p} A(x) = s_k(x)` for the owning interval, zero outside `[-m, m]`.
    pub fn evaluate_weighted(&self, x: f64) -> f64 {
        match self.owner(x) {
            Some(k) => self.smoother(k).value(x),
            None => 0.0,
        }
    }

    /// `A(x) = ρ(x)^{-1/p} s_k(x)`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let w = self.evaluate_weighted(x);
        if w == 0.0 {
            return Ok(0.0);
        }
        let weight = (-ln_gaussian_density(x) / self.p).exp();
        if !weight.is_finite() {
            return Err(Error::Overflow {
                x,
                exponent: -1.0 / self.p,
            });
        }
        Ok(weight * w)
    }

    /// All sample locations, ordered by interval index.
    pub fn points(&self) -> Vec<f64> {
        self.smoothers.iter().flat_map(|s| s.points.iter().copied()).collect()
    }
}

impl WeightedApproximant for SplineApproximant {
    fn support_radius(&self) -> f64 {
        self.m as f64
    }

    fn breakpoints(&self) -> Vec<f64> {
        let m = self.m as i32;
        (-m..=m).map(f64::from).collect()
    }

    fn weighted_value(&self, x: f64, p: f64) -> f64 {
        let w = self.evaluate_weighted(x);
        if p == self.p || w == 0.0 {
            w
        } else {
            w * ((1.0 / p - 1.0 / self.p) * ln_gaussian_density(x)).exp()
        }
    }
}
