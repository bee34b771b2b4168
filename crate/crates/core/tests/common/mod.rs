#![allow(dead_code)]

use std::f64::consts::PI;
use std::io::Write;

use gsr_core::special::ln_gaussian_density;
use gsr_core::{MaternKernel, TestFunction};
use num_complex::Complex64;

/// Writes a result line straight to stdout so it survives output capture.
pub fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion:>2} [{status}] {name}: {detail}\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

/// `g(x) = f(x) ρ(x)^{1/p}`.
pub fn weighted(f: &TestFunction, x: f64, p: f64) -> f64 {
    f.derivative(0, x).unwrap() * (ln_gaussian_density(x) / p).exp()
}

/// O(n²) aliased coefficients `(sqrt(2T)/n) Σ_j g_j e^{-2πikj/n}` for
/// `k = -⌊n/2⌋..=⌊n/2⌋`, halving the `±n/2` pair when `n` is even.
pub fn direct_coefficients(samples: &[f64], half_width: f64) -> Vec<Complex64> {
    let n = samples.len();
    let half = (n / 2) as i64;
    let scale = (2.0 * half_width).sqrt() / n as f64;
    (-half..=half)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, g) in samples.iter().enumerate() {
                let angle = -2.0 * PI * (k * j as i64).rem_euclid(n as i64) as f64 / n as f64;
                acc += Complex64::from_polar(*g, angle);
            }
            let c = acc * scale;
            if n.is_multiple_of(2) && k.abs() == half {
                c * 0.5
            } else {
                c
            }
        })
        .collect()
}

fn gram(kernel: &MaternKernel, points: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|x| points.iter().map(|y| kernel.eval(*x, *y)).collect())
        .collect()
}

fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimises `‖v - K a‖² + λ aᵀ K a` by restarted conjugate gradients with
/// exact line searches, using only the objective's gradient and curvature
/// along each search direction (no linear solve).
pub fn minimise_smoothing_objective(
    kernel: &MaternKernel,
    points: &[f64],
    values: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let k = gram(kernel, points);
    let nu = points.len();
    let gradient = |a: &[f64]| -> Vec<f64> {
        let ka = mat_vec(&k, a);
        let inner: Vec<f64> = ka
            .iter()
            .zip(values)
            .zip(a)
            .map(|((s, v), ai)| s - v + lambda * ai)
            .collect();
        mat_vec(&k, &inner).iter().map(|x| 2.0 * x).collect()
    };
    // dᵀ H d / 2 with H = 2(K² + λK)
    let curvature = |d: &[f64]| -> f64 {
        let kd = mat_vec(&k, d);
        dot(&kd, &kd) + lambda * dot(d, &kd)
    };
    let mut a = vec![0.0; nu];
    for _restart in 0..50 {
        let mut g = gradient(&a);
        let mut d: Vec<f64> = g.iter().map(|x| -x).collect();
        for _ in 0..nu {
            let gg = dot(&g, &g);
            if gg == 0.0 {
                return a;
            }
            let c = curvature(&d);
            if c <= 0.0 || c.is_nan() {
                break;
            }
            let step = -dot(&g, &d) / (2.0 * c);
            for (ai, di) in a.iter_mut().zip(&d) {
                *ai += step * di;
            }
            let g_next = gradient(&a);
            let beta = dot(&g_next, &g_next) / gg;
            d = d.iter().zip(&g_next).map(|(di, gi)| -gi + beta * di).collect();
            g = g_next;
        }
    }
    a
}
