//! Bernoulli-corrected periodic companion of `g = f ρ^{1/p}` on `[-T, T]`:
//!
//! `G(x) = g(x) - Σ_{τ=1}^{α} B^{[-T,T]}_τ(x)/τ! · ∫_{-T}^{T} g^{(τ)}`.
//!
//! `G` and its first `α - 1` derivatives take equal values at `±T`. The
//! approximation algorithms never use `G`; it exists so that this boundary
//! matching can be checked numerically.

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::metrics::{g_derivative, QuadratureConfig};
use crate::special::{factorial, scaled_bernoulli};
use crate::trig::ApproximationParams;

#[derive(Debug, Clone)]
pub struct AuxiliaryG {
    base: TestFunction,
    p: f64,
    half_width: f64,
    alpha: usize,
    /// `μ_τ = ∫_{-T}^{T} g^{(τ)}` for `τ = 1..=α`.
    moments: Vec<f64>,
    cfg: QuadratureConfig,
}

impl AuxiliaryG {
    /// Computes the moments `μ_τ` by composite Gauss–Legendre on `[-T, T]`,
    /// with the panel density and order taken from `cfg`.
    pub fn build(
        f: &TestFunction,
        params: &ApproximationParams,
        half_width: f64,
        cfg: &QuadratureConfig,
    ) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid("T", format!("{half_width} must be positive")));
        }
        let alpha = params.alpha() as usize;
        f.require_order(alpha)?;
        let cfg = interval_config(cfg, half_width);
        let p = params.p();
        let mut moments = Vec::with_capacity(alpha);
        for tau in 1..=alpha {
            moments.push(cfg.integrate(f.kinks(), |x| {
                g_derivative(f, p, tau, x).unwrap_or(f64::NAN)
            })?);
        }
        Ok(AuxiliaryG {
            base: f.clone(),
            p,
            half_width,
            alpha,
            moments,
            cfg,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn moments(&self) -> &[f64] {
        &self.moments
    }

    /// `g^{(τ)}(x)`.
    pub fn base_derivative(&self, tau: usize, x: f64) -> Result<f64> {
        g_derivative(&self.base, self.p, tau, x)
    }

    /// `G^{(τ)}(x)` for `τ ≤ α`, `|x| ≤ T`, using
    /// `d^{τ'}/dx^{τ'} B_τ/τ! = B_{τ-τ'}/(τ-τ')!`.
    pub fn derivative(&self, tau: usize, x: f64) -> Result<f64> {
        if tau > self.alpha {
            return Err(Error::invalid(
                "tau",
                format!("order {tau} exceeds alpha = {}", self.alpha),
            ));
        }
        let mut v = self.base_derivative(tau, x)?;
        for sigma in tau.max(1)..=self.alpha {
            let b = scaled_bernoulli(sigma - tau, self.half_width, x)?;
            v -= b / factorial(sigma - tau) * self.moments[sigma - 1];
        }
        Ok(v)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.derivative(0, x)
    }

    /// `|G^{(τ)}(T) - G^{(τ)}(-T)| / (1 + |G^{(τ)}(T)|)` for `τ = 0..α`.
    pub fn check_boundary_matching(&self) -> Result<Vec<f64>> {
        let t = self.half_width;
        (0..self.alpha)
            .map(|tau| {
                let right = self.derivative(tau, t)?;
                let left = self.derivative(tau, -t)?;
                Ok((right - left).abs() / (1.0 + right.abs()))
            })
            .collect()
    }

    /// `|∫ G^{(τ)}| / ∫ |G^{(τ)}|` over `[-T, T]` for `τ = 1..=α` (0 when `G^{(τ)} ≡ 0`).
    pub fn derivative_mean_residuals(&self) -> Result<Vec<f64>> {
        let kinks = self.base.kinks().to_vec();
        (1..=self.alpha)
            .map(|tau| {
                let signed = self
                    .cfg
                    .integrate(&kinks, |x| self.derivative(tau, x).unwrap_or(f64::NAN))?;
                let total = self
                    .cfg
                    .integrate(&kinks, |x| self.derivative(tau, x).unwrap_or(f64::NAN).abs())?;
                Ok(if total == 0.0 { signed.abs() } else { signed.abs() / total })
            })
            .collect()
    }
}

fn interval_config(cfg: &QuadratureConfig, half_width: f64) -> QuadratureConfig {
    let width = if cfg.truncation_radius > 0.0 {
        2.0 * cfg.truncation_radius / cfg.panel_count as f64
    } else {
        crate::metrics::DEFAULT_PANEL_WIDTH
    };
    QuadratureConfig {
        panel_count: ((2.0 * half_width / width).ceil() as usize).max(1),
        nodes_per_panel: cfg.nodes_per_panel,
        truncation_radius: half_width,
        breakpoints: Vec::new(),
        tail_length: 0.0,
        tail_panel_count: 1,
    }
}

/// Builds `G` (convenience wrapper around [`AuxiliaryG::build`]).
pub fn build_auxiliary_g(
    f: &TestFunction,
    params: &ApproximationParams,
    half_width: f64,
    cfg: &QuadratureConfig,
) -> Result<AuxiliaryG> {
    AuxiliaryG::build(f, params, half_width, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use approx::assert_relative_eq;

    fn params(alpha: u32) -> ApproximationParams {
        ApproximationParams::new(1.0, 2.0, alpha, Some(0.25)).unwrap()
    }

    fn linear() -> TestFunction {
        TestFunction::new("x", |x| x).with_derivative(|_| 1.0)
    }

    #[test]
    fn zero_function() {
        let f = TestFunction::new("zero", |_| 0.0)
            .with_derivative(|_| 0.0)
            .with_derivative(|_| 0.0);
        let g = AuxiliaryG::build(&f, &params(2), 3.0, &QuadratureConfig::new(3.0, [])).unwrap();
        assert!(g.moments().iter().all(|m| *m == 0.0));
        assert_eq!(g.value(1.2).unwrap(), 0.0);
        assert!(g.check_boundary_matching().unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn alpha_one_linear() {
        let t = 2.0;
        let f = linear();
        let g = AuxiliaryG::build(&f, &params(1), t, &QuadratureConfig::new(t, [])).unwrap();
        let gt = g.base_derivative(0, t).unwrap();
        let gm = g.base_derivative(0, -t).unwrap();
        // fundamental theorem of calculus
        assert_relative_eq!(g.moments()[0], gt - gm, max_relative = 1e-13);
        let x = 0.7;
        let want = g.base_derivative(0, x).unwrap() - ((x + t) / (2.0 * t) - 0.5) * g.moments()[0];
        assert_relative_eq!(g.value(x).unwrap(), want, max_relative = 1e-13);
        assert!((g.value(t).unwrap() - g.value(-t).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn boundary_matching_on_corpus() {
        let cases = [("poly2", 2u32, 3.0), ("abs3", 3, 5.0), ("sin", 4, 2.0), ("abs5", 5, 4.0)];
        for (id, alpha, t) in cases {
            let f = corpus::lookup(id).unwrap();
            let g = AuxiliaryG::build(&f, &params(alpha), t, &QuadratureConfig::new(t, [])).unwrap();
            for (tau, r) in g.check_boundary_matching().unwrap().iter().enumerate() {
                assert!(*r <= 1e-8, "{id} tau={tau}: {r}");
            }
            for (tau, r) in g.derivative_mean_residuals().unwrap().iter().enumerate() {
                assert!(*r <= 1e-8, "{id} mean tau={}: {r}", tau + 1);
            }
        }
    }

    #[test]
    fn correction_is_low_degree_polynomial() {
        let f = corpus::lookup("abs3").unwrap();
        let t = 5.0;
        let alpha = 3;
        let g = AuxiliaryG::build(&f, &params(alpha), t, &QuadratureConfig::new(t, [])).unwrap();
        let h = 0.4;
        let diff = |x: f64| g.base_derivative(0, x).unwrap() - g.value(x).unwrap();
        let scale = (-12..=12).map(|i| diff(i as f64 * h).abs()).fold(0.0, f64::max);
        // (α+1)-th forward difference of a degree-α polynomial vanishes
        for start in [-4.8, -1.0, 2.9] {
            let mut fd = 0.0;
            for j in 0..=alpha as usize + 1 {
                let sign = if (alpha as usize + 1 - j).is_multiple_of(2) { 1.0 } else { -1.0 };
                fd += sign * crate::special::binomial(alpha as usize + 1, j) * diff(start + j as f64 * h);
            }
            assert!(fd.abs() <= 1e-8 * scale.max(1e-300), "{fd}");
        }
    }

    #[test]
    fn rejects_undeclared_order() {
        let f = corpus::lookup("abs").unwrap();
        assert!(AuxiliaryG::build(&f, &params(2), 2.0, &QuadratureConfig::new(2.0, [])).is_err());
        let g = AuxiliaryG::build(&f, &params(1), 2.0, &QuadratureConfig::new(2.0, [])).unwrap();
        assert!(g.derivative(2, 0.0).is_err());
        assert!(g.value(2.5).is_err());
    }
}
