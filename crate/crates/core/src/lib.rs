//! Sampling recovery of functions in Gaussian-weighted Sobolev spaces on the real line.
//!
//! Two linear algorithms are provided, both consuming point values of `f` and
//! producing an approximant whose error is measured in `L^p_ρ`, with `ρ` the
//! standard normal density:
//!
//! * [`trig`]: sample `g = f ρ^{1/p}` on an equispaced grid in `[-T, T]`,
//!   interpolate with trigonometric polynomials (coefficients by FFT) and
//!   reweight. The cutoff `T` grows like `sqrt(ln n)`.
//! * [`spline`]: split `[-m, m]` into unit intervals, spend `2^{m-k}` samples on
//!   the `k`-th interval and fit a Matérn-kernel spline smoother on each.
//!
//! The [`metrics`] module is the measurement side (weighted norms, rate
//! fitting, tail bounds), [`periodize`] builds the Bernoulli-corrected periodic
//! companion of `g`, and [`experiment`] wires everything into reproducible
//! convergence tables.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod error;
pub mod experiment;
pub mod function;
pub mod metrics;
pub mod periodize;
pub mod quadrature;
pub mod special;
pub mod spline;
pub mod trig;

pub use error::{Error, Result};
pub use function::{EvalCounter, TestFunction};
pub use experiment::{Algorithm, ConvergenceReport, ExperimentSpec, ReportRow};
pub use metrics::{QuadratureConfig, WeightedApproximant};
pub use special::{MaternKernel, MaternOrder};
pub use spline::{IntervalSmoother, SplineApproximant};
pub use trig::{ApproximationParams, TrigInterpolant};
