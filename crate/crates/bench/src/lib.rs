//! Fixed workloads for the `recovery` benchmarks, shared with the smoke tests.

use gsr_core::experiment::{build_approximant, error_quadrature, Approximant};
use gsr_core::{ApproximationParams, ExperimentSpec, MaternKernel, QuadratureConfig, TestFunction};

/// Target function used throughout: `|x|³`.
pub const FUNCTION: &str = "abs3";

pub fn trig_params() -> ApproximationParams {
    ApproximationParams::new(1.0, 2.0, 3, None).expect("valid parameters")
}

pub fn spline_kernel() -> MaternKernel {
    MaternKernel::new(1.5, 1.0).expect("supported order")
}

pub fn target() -> TestFunction {
    gsr_core::corpus::lookup(FUNCTION).expect("corpus member")
}

/// An approximant with its error quadrature, ready for `weighted_lp_error`.
pub struct ErrorCase {
    pub name: &'static str,
    pub approx: Approximant,
    pub cfg: QuadratureConfig,
}

pub fn error_cases() -> Vec<ErrorCase> {
    let f = target();
    let trig = ExperimentSpec::trig(FUNCTION, trig_params(), vec![129]);
    let spline_params = trig_params().with_alpha(2).expect("valid alpha");
    let spline = ExperimentSpec::spline(FUNCTION, spline_params, spline_kernel(), vec![5]);
    [("trig_129", &trig, 129u64), ("spline_m5", &spline, 5)]
        .into_iter()
        .map(|(name, spec, size)| {
            let approx = build_approximant(spec, &f, size).expect("buildable");
            let cfg = error_quadrature(&approx, 0);
            ErrorCase { name, approx, cfg }
        })
        .collect()
}
