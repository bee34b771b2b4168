//! Closed-form special functions: normalized probabilists' Hermite polynomials,
//! Bernoulli polynomials, half-integer Matérn kernels and powers of the standard
//! normal density.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest polynomial degree accepted by [`hermite_prob_normalized`] and [`bernoulli_poly`].
pub const MAX_DEGREE: usize = 32;

/// `ln sqrt(2π)`.
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Probabilists' Hermite polynomial normalized by `1/sqrt(ℓ!)`,
/// `H_ℓ(x) = (-1)^ℓ / sqrt(ℓ!) · e^{x²/2} dℓ/dxℓ e^{-x²/2}`.
///
/// Evaluated with the recurrence `sqrt(ℓ+1) H_{ℓ+1} = x H_ℓ - sqrt(ℓ) H_{ℓ-1}`.
pub fn hermite_prob_normalized(ell: usize, x: f64) -> Result<f64> {
    if ell > MAX_DEGREE {
        return Err(Error::invalid(
            "ell",
            format!("degree {ell} exceeds {MAX_DEGREE}"),
        ));
    }
    Ok(hermite_unchecked(ell, x))
}

pub(crate) fn hermite_unchecked(ell: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..ell {
        let next = (x * cur - (j as f64).sqrt() * prev) / ((j + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of `B_0 … B_MAX_DEGREE` in ascending powers of `u = t - 1/2`.
///
/// Centering keeps the coefficients small and makes odd-degree polynomials
/// exactly odd in `u`.
fn bernoulli_table() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table: Vec<Vec<f64>> = vec![vec![1.0]];
        for tau in 1..=MAX_DEGREE {
            // B_τ' = τ B_{τ-1}: integrate term by term, then fix the constant
            // so that ∫ B_τ = 0 over u ∈ [-1/2, 1/2].
            let lower = &table[tau - 1];
            let mut coeffs = vec![0.0; tau + 1];
            for (j, c) in lower.iter().enumerate() {
                coeffs[j + 1] = tau as f64 * c / (j + 1) as f64;
            }
            let mean: f64 = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(j, _)| j % 2 == 0)
                .map(|(j, c)| c * 0.5f64.powi(j as i32) / (j + 1) as f64)
                .sum();
            coeffs[0] = -mean;
            table.push(coeffs);
        }
        table
    })
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Standard Bernoulli polynomial `B_τ(t)` for `t ∈ [0, 1]`.
pub fn bernoulli_poly(tau: usize, t: f64) -> Result<f64> {
    if tau > MAX_DEGREE {
        return Err(Error::invalid(
            "tau",
            format!("degree {tau} exceeds {MAX_DEGREE}"),
        ));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid("t", format!("{t} outside [0, 1]")));
    }
    Ok(horner(&bernoulli_table()[tau], t - 0.5))
}

/// Bernoulli polynomial rescaled to `[-T, T]`:
/// `B^{[-T,T]}_τ(x) = (2T)^{τ-1} B_τ((x + T) / (2T))`.
pub fn scaled_bernoulli(tau: usize, half_width: f64, x: f64) -> Result<f64> {
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::invalid("T", format!("{half_width} is not positive")));
    }
    // one-sided evaluation at the endpoints may land a rounding step outside
    let slack = 1e-12 * half_width;
    if x.abs() > half_width + slack || x.is_nan() {
        return Err(Error::invalid(
            "x",
            format!("{x} outside [-{half_width}, {half_width}]"),
        ));
    }
    let t = ((x + half_width) / (2.0 * half_width)).clamp(0.0, 1.0);
    let scale = (2.0 * half_width).powi(tau as i32 - 1);
    Ok(scale * bernoulli_poly(tau, t)?)
}

/// Half-integer Matérn orders with closed-form kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MaternOrder {
    /// γ = 1/2
    Half,
    /// γ = 3/2
    ThreeHalves,
    /// γ = 5/2
    FiveHalves,
    /// γ = 7/2
    SevenHalves,
}

impl MaternOrder {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        let order = match gamma {
            0.5 => MaternOrder::Half,
            1.5 => MaternOrder::ThreeHalves,
            2.5 => MaternOrder::FiveHalves,
            3.5 => MaternOrder::SevenHalves,
            _ => {
                return Err(Error::invalid(
                    "gamma",
                    format!("{gamma} is not one of 1/2, 3/2, 5/2, 7/2"),
                ))
            }
        };
        Ok(order)
    }

    /// `k` in `γ = k + 1/2`.
    pub fn index(self) -> usize {
        match self {
            MaternOrder::Half => 0,
            MaternOrder::ThreeHalves => 1,
            MaternOrder::FiveHalves => 2,
            MaternOrder::SevenHalves => 3,
        }
    }

    pub fn gamma(self) -> f64 {
        self.index() as f64 + 0.5
    }

    /// Order of the Sobolev space reproduced by the kernel, `γ + 1/2`.
    pub fn space_order(self) -> u32 {
        self.index() as u32 + 1
    }
}

/// Matérn kernel `K(x, y) = Φ_γ(|x - y|)` with half-integer order and length scale `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaternKernel {
    order: MaternOrder,
    length_scale: f64,
}

impl MaternKernel {
    pub fn new(gamma: f64, length_scale: f64) -> Result<Self> {
        Self::with_order(MaternOrder::from_gamma(gamma)?, length_scale)
    }

    pub fn with_order(order: MaternOrder, length_scale: f64) -> Result<Self> {
        if !(length_scale > 0.0) || !length_scale.is_finite() {
            return Err(Error::invalid(
                "length_scale",
                format!("{length_scale} is not positive"),
            ));
        }
        Ok(MaternKernel {
            order,
            length_scale,
        })
    }

    pub fn order(&self) -> MaternOrder {
        self.order
    }

    pub fn gamma(&self) -> f64 {
        self.order.gamma()
    }

    pub fn length_scale(&self) -> f64 {
        self.length_scale
    }

    pub fn space_order(&self) -> u32 {
        self.order.space_order()
    }

    /// `Φ_γ(r)` without argument validation; `r` is taken by absolute value.
    pub fn phi(&self, r: f64) -> f64 {
        let nu = 2.0 * self.order.gamma();
        let z = nu.sqrt() * r.abs() / self.length_scale;
        let poly = match self.order {
            MaternOrder::Half => 1.0,
            MaternOrder::ThreeHalves => 1.0 + z,
            MaternOrder::FiveHalves => 1.0 + z + z * z / 3.0,
            MaternOrder::SevenHalves => 1.0 + z + 0.4 * z * z + z * z * z / 15.0,
        };
        poly * (-z).exp()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.phi(x - y)
    }
}

/// `Φ_γ(r)` for `r ≥ 0`.
pub fn matern_phi(kernel: &MaternKernel, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::invalid("r", format!("{r} is negative")));
    }
    Ok(kernel.phi(r))
}

/// `ln ρ(x)` for the standard normal density.
pub fn ln_gaussian_density(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// `ρ(x)^s`, evaluated in log space. Underflow goes to zero; overflow is an error.
pub fn gaussian_density_pow(x: f64, s: f64) -> Result<f64> {
    let v = (s * ln_gaussian_density(x)).exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow { x, exponent: s })
    }
}

/// `k`-th derivative of `ρ(x)^{1/p}`, via
/// `(-1)^k sqrt(k!) p^{-k/2} H_k(x / sqrt(p)) ρ^{1/p}(x)`.
pub(crate) fn density_root_derivative(k: usize, p: f64, x: f64) -> f64 {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sqrt_fact = (1..=k).map(|j| (j as f64).sqrt()).product::<f64>();
    let base = (ln_gaussian_density(x) / p).exp();
    sign * sqrt_fact * p.powf(-(k as f64) / 2.0) * hermite_unchecked(k, x / p.sqrt()) * base
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|j| j as f64).product()
}
