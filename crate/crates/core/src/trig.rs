//! Truncated trigonometric interpolation.
//!
//! `g = f ρ^{1/p}` is sampled at `ξ_j = -T + 2Tj/n`, interpolated by a
//! trigonometric polynomial in the orthonormal basis
//! `φ_k(x) = exp(iπk(x + T)/T) / sqrt(2T)` and reweighted by `ρ^{-1/p}`.
//! The result is set to zero outside `[-T, T]`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::metrics::{weighted_sample, WeightedApproximant};
use crate::special::ln_gaussian_density;

/// Exponents governing both algorithms and the error measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproximationParams {
    p: f64,
    q: f64,
    alpha: u32,
    epsilon: f64,
}

impl ApproximationParams {
    /// Validates `1 ≤ p < q < ∞`, `α ≥ 1` and `0 < ε < (q - p)/(pq)`.
    /// `ε` defaults to the midpoint `(q - p)/(2pq)`.
    pub fn new(p: f64, q: f64, alpha: u32, epsilon: Option<f64>) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::invalid("p", format!("{p} must satisfy p >= 1")));
        }
        if !(q > p) || !q.is_finite() {
            return Err(Error::invalid("q", format!("{q} must satisfy p < q < inf")));
        }
        if alpha == 0 {
            return Err(Error::invalid("alpha", "must be at least 1"));
        }
        let gap = (q - p) / (p * q);
        let epsilon = epsilon.unwrap_or(gap / 2.0);
        if !(epsilon > 0.0 && epsilon < gap) {
            return Err(Error::invalid(
                "epsilon",
                format!("{epsilon} outside (0, {gap})"),
            ));
        }
        Ok(ApproximationParams {
            p,
            q,
            alpha,
            epsilon,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `(q - p)/(pq) - ε`, the Gaussian decay rate left after the slack.
    pub fn decay_rate(&self) -> f64 {
        (self.q - self.p) / (self.p * self.q) - self.epsilon
    }

    pub fn with_alpha(self, alpha: u32) -> Result<Self> {
        Self::new(self.p, self.q, alpha, Some(self.epsilon))
    }
}

fn cutoff_from_order(order: f64, n: u64, params: &ApproximationParams) -> f64 {
    (2.0 * order / params.decay_rate() * (n as f64).ln()).sqrt()
}

/// Cutoff `T = sqrt(2α ((q - p)/(pq) - ε)^{-1} ln n)`.
pub fn select_t(n: u64, params: &ApproximationParams) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", format!("{n} < 2")));
    }
    Ok(cutoff_from_order(params.alpha() as f64, n, params))
}

/// Smoothness-agnostic cutoff: `α` is replaced by a nondecreasing `γ(n)`.
/// `params.alpha()` is ignored.
pub fn select_t_alpha_free(
    n: u64,
    gamma_fn: impl Fn(u64) -> f64,
    params: &ApproximationParams,
) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", format!("{n} < 2")));
    }
    let gamma = gamma_fn(n);
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma_fn", format!("gamma({n}) = {gamma} is not positive")));
    }
    Ok(cutoff_from_order(gamma, n, params))
}

/// Default growth function for [`select_t_alpha_free`]: `max(ln ln n, 1)`.
pub fn log_log_floor_one(n: u64) -> f64 {
    (n as f64).ln().ln().max(1.0)
}

/// Equispaced nodes `ξ_j = -T + 2Tj/n`, `j = 0, …, n-1`.
pub fn trig_nodes(n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|j| 2.0 * half_width * j as f64 / n as f64 - half_width)
        .collect()
}

/// Weighted trigonometric interpolant with cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigInterpolant {
    half_width: f64,
    n: usize,
    p: f64,
    /// `c_k` for `k = -⌊n/2⌋ ..= ⌊n/2⌋`.
    coeffs: Vec<Complex64>,
}

impl TrigInterpolant {
    /// Samples `g = f ρ^{1/p}` at the `n` nodes (exactly `n` calls to `f`) and
    /// interpolates.
    pub fn build(f: &TestFunction, n: usize, half_width: f64, p: f64) -> Result<Self> {
        check_shape(n, half_width, p)?;
        let mut samples = Vec::with_capacity(n);
        for x in trig_nodes(n, half_width) {
            let fx = f.value(x);
            if !fx.is_finite() {
                return Err(Error::NonFiniteSample { x, value: fx });
            }
            samples.push(weighted_sample(fx, x, p));
        }
        Self::from_weighted_samples(&samples, half_width, p)
    }

    /// Interpolates given values of `g` at [`trig_nodes`]`(samples.len(), T)`.
    ///
    /// `c_k = (sqrt(2T)/n) Σ_j g(ξ_j) e^{-2πikj/n}` via FFT; for even `n` the
    /// aliased pair `k = ±n/2` shares the Nyquist term equally.
    pub fn from_weighted_samples(samples: &[f64], half_width: f64, p: f64) -> Result<Self> {
        let n = samples.len();
        check_shape(n, half_width, p)?;
        if let Some((j, &v)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                x: trig_nodes(n, half_width)[j],
                value: v,
            });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);

        let half = n / 2;
        let scale = (2.0 * half_width).sqrt() / n as f64;
        let coeffs = (0..=2 * half)
            .map(|i| {
                let k = i as i64 - half as i64;
                let c = buf[k.rem_euclid(n as i64) as usize] * scale;
                if n.is_multiple_of(2) && k.unsigned_abs() as usize == half {
                    c * 0.5
                } else {
                    c
                }
            })
            .collect();
        Ok(TrigInterpolant {
            half_width,
            n,
            p,
            coeffs,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k`, or `None` when `|k| > ⌊n/2⌋`.
    pub fn coeff(&self, k: i64) -> Option<Complex64> {
        let half = (self.n / 2) as i64;
        (k.abs() <= half).then(|| self.coeffs[(k + half) as usize])
    }

    pub fn nodes(&self) -> Vec<f64> {
        trig_nodes(self.n, self.half_width)
    }

    /// `𝓘_n(g)(x) = ρ(x)^{1/p} A(x)`; zero outside `[-T, T]`.
    pub fn evaluate_weighted(&self, x: f64) -> f64 {
        if !(x.abs() <= self.half_width) {
            return 0.0;
        }
        let half = (self.n / 2) as i64;
        let theta = PI * (x + self.half_width) / self.half_width;
        let sum: f64 = self
            .coeffs
            .iter()
            .zip(-half..=half)
            .map(|(c, k)| {
                let (s, co) = (k as f64 * theta).sin_cos();
                c.re * co - c.im * s
            })
            .sum();
        sum / (2.0 * self.half_width).sqrt()
    }

    /// `A(x) = ρ(x)^{-1/p} 𝓘_n(g)(x)`; zero outside `[-T, T]`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= self.half_width) {
            return Ok(0.0);
        }
        let weight = (-ln_gaussian_density(x) / self.p).exp();
        if !weight.is_finite() {
            return Err(Error::Overflow {
                x,
                exponent: -1.0 / self.p,
            });
        }
        Ok(weight * self.evaluate_weighted(x))
    }
}

fn check_shape(n: usize, half_width: f64, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "must be positive"));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::invalid("T", format!("{half_width} must be positive")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::invalid("p", format!("{p} must satisfy p >= 1")));
    }
    Ok(())
}

impl WeightedApproximant for TrigInterpolant {
    fn support_radius(&self) -> f64 {
        self.half_width
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-self.half_width, self.half_width]
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
