//! End-to-end checks of the recovery algorithms. Each test prints one
//! PASS/FAIL line with the measured quantity and its tolerance.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{direct_coefficients, minimise_smoothing_objective, report, weighted};
use gsr_core::experiment::{run_experiment, ConvergenceReport};
use gsr_core::metrics::{decay_norm_estimate, tail_bound, tail_lp_norm};
use gsr_core::periodize::AuxiliaryG;
use gsr_core::spline::{allocate_points, fit_interval_smoother, smoothing_objective};
use gsr_core::trig::{select_t, trig_nodes};
use gsr_core::{
    corpus, ApproximationParams, ExperimentSpec, MaternKernel, QuadratureConfig,
    SplineApproximant, TrigInterpolant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIG_SIZES: [u64; 6] = [17, 33, 65, 129, 257, 513];
const SPLINE_LEVELS: [u64; 6] = [2, 3, 4, 5, 6, 7];

fn params(alpha: u32, eps: Option<f64>) -> ApproximationParams {
    ApproximationParams::new(1.0, 2.0, alpha, eps).unwrap()
}

fn trig_spec(refinement: u32) -> ExperimentSpec {
    let mut spec = ExperimentSpec::trig("abs3", params(3, None), TRIG_SIZES.to_vec());
    spec.quadrature_refinement = refinement;
    spec
}

fn spline_spec(gamma: f64, refinement: u32) -> ExperimentSpec {
    let kernel = MaternKernel::new(gamma, 1.0).unwrap();
    let mut spec = ExperimentSpec::spline("abs3", params(2, None), kernel, SPLINE_LEVELS.to_vec());
    spec.quadrature_refinement = refinement;
    spec
}

/// Runs each convergence experiment once, remembering its wall time.
fn timed(spec: ExperimentSpec, cell: &'static OnceLock<(ConvergenceReport, Duration)>) -> &'static (ConvergenceReport, Duration) {
    cell.get_or_init(|| {
        let start = Instant::now();
        let r = run_experiment(&spec).unwrap();
        (r, start.elapsed())
    })
}

fn trig_report() -> &'static (ConvergenceReport, Duration) {
    static CELL: OnceLock<(ConvergenceReport, Duration)> = OnceLock::new();
    timed(trig_spec(0), &CELL)
}

fn spline_report(gamma: f64) -> &'static (ConvergenceReport, Duration) {
    static C32: OnceLock<(ConvergenceReport, Duration)> = OnceLock::new();
    static C52: OnceLock<(ConvergenceReport, Duration)> = OnceLock::new();
    let cell = if gamma == 1.5 { &C32 } else { &C52 };
    timed(spline_spec(gamma, 0), cell)
}

fn fmt_errors(r: &ConvergenceReport) -> String {
    r.errors().iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
}

#[test]
fn criterion_01_point_allocation() {
    let start = Instant::now();
    let a4 = allocate_points(4).unwrap();
    let a5 = allocate_points(5).unwrap();
    let elapsed = start.elapsed();
    let pass = a4.per_interval == vec![8, 4, 2, 1]
        && a4.total == 30
        && a5.per_interval == vec![16, 8, 4, 2, 1]
        && a5.total == 62
        && elapsed < Duration::from_millis(1);
    report(
        1,
        "point allocation",
        pass,
        &format!(
            "m=4 -> {:?} n={}, m=5 -> n={} (exact), {:?} < 1ms",
            a4.per_interval, a4.total, a5.total, elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_cutoff_formula() {
    let t = select_t(30, &params(4, Some(0.25))).unwrap();
    let want = (32.0 * 30f64.ln()).sqrt();
    let rel = (t - want).abs() / want;
    let pass = rel <= 1e-9;
    report(2, "cutoff formula", pass, &format!("T={t:.6}, sqrt(32 ln 30)={want:.6}, rel={rel:.1e} <= 1e-9"));
    assert!(pass);
}

#[test]
fn criterion_03_nodal_interpolation() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for id in corpus::IDS {
        let f = corpus::lookup(id).unwrap();
        for n in [9usize, 33, 129, 257] {
            let t = select_t(n as u64, &params(3, None)).unwrap();
            let interp = TrigInterpolant::build(&f, n, t, 1.0).unwrap();
            let nodes = trig_nodes(n, t);
            let g: Vec<f64> = nodes.iter().map(|&x| weighted(&f, x, 1.0)).collect();
            let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let resid = nodes
                .iter()
                .zip(&g)
                .map(|(&x, gj)| (interp.evaluate_weighted(x) - gj).abs())
                .fold(0.0f64, f64::max);
            worst = worst.max(resid / scale);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(5);
    report(3, "nodal interpolation", pass, &format!("max rel residual {worst:.1e} <= 1e-9, {elapsed:?} < 5s"));
    assert!(pass);
}

#[test]
fn criterion_04_fft_matches_direct_sum() {
    let f = corpus::lookup("gauss_bump").unwrap();
    let mut worst: f64 = 0.0;
    for n in [8usize, 9, 64, 65] {
        let t = 3.0;
        let interp = TrigInterpolant::build(&f, n, t, 1.0).unwrap();
        let g: Vec<f64> = trig_nodes(n, t)
            .iter()
            .map(|&x| weighted(&f, x, 1.0))
            .collect();
        let direct = direct_coefficients(&g, t);
        let scale = direct.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        let diff = interp
            .coeffs()
            .iter()
            .zip(&direct)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        worst = worst.max(diff / scale);
    }
    let pass = worst <= 1e-11;
    report(4, "FFT/direct equivalence", pass, &format!("max rel difference {worst:.1e} <= 1e-11"));
    assert!(pass);
}

#[test]
fn criterion_05_trig_convergence() {
    let (r, elapsed) = trig_report();
    let rate = r.fitted_rate.unwrap();
    let pass = (-3.6..=-2.5).contains(&rate) && *elapsed < Duration::from_secs(60);
    report(
        5,
        "trig convergence",
        pass,
        &format!("rate {rate:.3} in [-3.6, -2.5], {elapsed:.2?} < 60s; errors [{}]", fmt_errors(r)),
    );
    assert!(pass);
}

fn spline_criterion(criterion: u32, gamma: f64) {
    let (r, elapsed) = spline_report(gamma);
    let rate = r.fitted_rate.unwrap();
    let errors = r.errors();
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    let pass = rate <= -1.7 && decreasing && *elapsed < Duration::from_secs(60);
    report(
        criterion,
        &format!("spline convergence (gamma={gamma})"),
        pass,
        &format!(
            "rate {rate:.3} <= -1.7, strictly decreasing={decreasing}, {elapsed:.2?} < 60s; errors [{}]",
            fmt_errors(r)
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_spline_convergence() {
    spline_criterion(6, 1.5);
}

#[test]
fn criterion_07_misspecified_smoothness() {
    spline_criterion(7, 2.5);
}

#[test]
fn criterion_08_periodization() {
    let mut worst_boundary: f64 = 0.0;
    let mut worst_mean: f64 = 0.0;
    for id in ["poly2", "abs3"] {
        let f = corpus::lookup(id).unwrap();
        for alpha in [2u32, 3] {
            for t in [2.0, 5.0] {
                let g = AuxiliaryG::build(&f, &params(alpha, Some(0.25)), t, &QuadratureConfig::new(t, []))
                    .unwrap();
                for r in g.check_boundary_matching().unwrap() {
                    worst_boundary = worst_boundary.max(r);
                }
                for r in g.derivative_mean_residuals().unwrap() {
                    worst_mean = worst_mean.max(r);
                }
            }
        }
    }
    let pass = worst_boundary <= 1e-8 && worst_mean <= 1e-8;
    report(
        8,
        "periodization",
        pass,
        &format!("boundary residual {worst_boundary:.1e} <= 1e-8, mean residual {worst_mean:.1e} <= 1e-8"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_spline_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let nu = rng.gen_range(1..=8usize);
        let gamma = [0.5, 1.5, 2.5, 3.5][rng.gen_range(0..4)];
        let kernel = MaternKernel::new(gamma, rng.gen_range(0.1..1.0)).unwrap();
        let lambda = 10f64.powf(rng.gen_range(-3.0..0.0));
        let k = rng.gen_range(1..=4i32) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let left = if k > 0 { (k - 1) as f64 } else { k as f64 };
        let mut pts: Vec<f64> = (0..nu).map(|_| left + rng.gen_range(0.02..0.98)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        let values: Vec<f64> = pts.iter().map(|_| rng.gen_range(-2.0..2.0)).collect();

        let s = fit_interval_smoother(k, pts.clone(), &values, kernel, lambda).unwrap();
        let solved = s.objective(&values);
        let brute = minimise_smoothing_objective(&kernel, &pts, &values, lambda);
        let brute_obj = smoothing_objective(&kernel, &pts, &values, &brute, lambda);
        worst = worst.max((solved - brute_obj).abs() / brute_obj.max(1.0));
    }
    let pass = worst <= 1e-6;
    report(9, "spline optimality oracle", pass, &format!("max objective gap {worst:.1e} <= 1e-6 over 20 instances"));
    assert!(pass);
}

#[test]
fn criterion_10_error_oracle_self_consistency() {
    let cases = [
        ("trig", trig_report().0.clone(), trig_spec(1)),
        ("spline 3/2", spline_report(1.5).0.clone(), spline_spec(1.5, 1)),
        ("spline 5/2", spline_report(2.5).0.clone(), spline_spec(2.5, 1)),
    ];
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for (name, base, fine_spec) in cases {
        let fine = run_experiment(&fine_spec).unwrap();
        let change = base
            .errors()
            .iter()
            .zip(fine.errors())
            .map(|(a, b)| (a - b).abs() / b.abs())
            .fold(0.0f64, f64::max);
        detail.push(format!("{name} {change:.1e}"));
        worst = worst.max(change);
    }
    let pass = worst < 1e-3;
    report(10, "error-oracle self-consistency", pass, &format!("max relative change {worst:.1e} < 1e-3 ({})", detail.join(", ")));
    assert!(pass);
}

#[test]
fn criterion_11_tail_bound_domination() {
    let mut worst_ratio: f64 = 0.0;
    for id in corpus::IDS {
        let f = corpus::lookup(id).unwrap();
        let alpha = f.alpha_known().min(8) as u32;
        let p = params(alpha.max(1), Some(0.25));
        for t in [3.0, 5.0, 8.0] {
            let tail = tail_lp_norm(&f, 1.0, t, &QuadratureConfig::new(t, [])).unwrap();
            let decay = decay_norm_estimate(&f, &p, t + 20.0, 0.01).unwrap();
            let bound = tail_bound(&p, decay, t).unwrap();
            worst_ratio = worst_ratio.max(tail / bound);
        }
    }
    let pass = worst_ratio <= 1.0;
    report(11, "tail-bound domination", pass, &format!("max tail/bound {worst_ratio:.3} <= 1"));
    assert!(pass);
}

#[test]
fn criterion_12_evaluation_budget() {
    let f = corpus::lookup("sin").unwrap();
    let mut ok = true;
    let mut counts = Vec::new();
    for n in [2usize, 9, 30, 64, 257] {
        let (g, counter) = f.instrumented();
        TrigInterpolant::build(&g, n, 4.0, 1.0).unwrap();
        ok &= counter.count() == n;
        counts.push(format!("trig n={n}: {}", counter.count()));
    }
    let kernel = MaternKernel::new(1.5, 1.0).unwrap();
    for m in 1..=6u32 {
        let (g, counter) = f.instrumented();
        SplineApproximant::build(&g, m, kernel, 2, 1.0).unwrap();
        let want = 2 * ((1usize << m) - 1);
        ok &= counter.count() == want;
        counts.push(format!("spline m={m}: {}/{want}", counter.count()));
    }
    report(12, "evaluation budget", ok, &counts.join(", "));
    assert!(ok);
}
