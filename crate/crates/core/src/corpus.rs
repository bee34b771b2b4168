//! Named test functions with exact derivatives.

use crate::error::{Error, Result};
use crate::function::TestFunction;
use crate::special::hermite_unchecked;

/// Identifiers accepted by [`lookup`].
pub const IDS: [&str; 6] = ["abs", "abs3", "abs5", "poly2", "sin", "gauss_bump"];

/// Order declared for the smooth members.
const SMOOTH_ORDER: usize = 8;

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Looks up a corpus member by id.
pub fn lookup(id: &str) -> Result<TestFunction> {
    let f = match id {
        "abs" => TestFunction::new(id, f64::abs)
            .with_derivative(sign)
            .with_kinks([0.0]),
        "abs3" => TestFunction::new(id, |x: f64| x.abs().powi(3))
            .with_derivative(|x| 3.0 * x * x.abs())
            .with_derivative(|x| 6.0 * x.abs())
            .with_derivative(|x| 6.0 * sign(x))
            .with_kinks([0.0]),
        "abs5" => TestFunction::new(id, |x: f64| x.abs().powi(5))
            .with_derivative(|x| 5.0 * x * x.abs().powi(3))
            .with_derivative(|x| 20.0 * x.abs().powi(3))
            .with_derivative(|x| 60.0 * x * x.abs())
            .with_derivative(|x| 120.0 * x.abs())
            .with_derivative(|x| 120.0 * sign(x))
            .with_kinks([0.0]),
        "poly2" => {
            let mut f = TestFunction::new(id, |x| x * x)
                .with_derivative(|x| 2.0 * x)
                .with_derivative(|_| 2.0);
            for _ in 3..=SMOOTH_ORDER {
                f = f.with_derivative(|_| 0.0);
            }
            f
        }
        "sin" => {
            let mut f = TestFunction::new(id, f64::sin);
            for k in 1..=SMOOTH_ORDER {
                f = match k % 4 {
                    1 => f.with_derivative(f64::cos),
                    2 => f.with_derivative(|x| -x.sin()),
                    3 => f.with_derivative(|x| -x.cos()),
                    _ => f.with_derivative(f64::sin),
                };
            }
            f
        }
        "gauss_bump" => {
            // d^k/dx^k e^{-x²} = (-1)^k 2^{k/2} sqrt(k!) H_k(sqrt(2) x) e^{-x²}
            let mut f = TestFunction::new(id, |x: f64| (-x * x).exp());
            for k in 1..=SMOOTH_ORDER {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let scale = sign
                    * 2f64.powf(k as f64 / 2.0)
                    * (1..=k).map(|j| (j as f64).sqrt()).product::<f64>();
                f = f.with_derivative(move |x: f64| {
                    scale * hermite_unchecked(k, std::f64::consts::SQRT_2 * x) * (-x * x).exp()
                });
            }
            f
        }
        _ => return Err(Error::UnknownFunction(id.to_string())),
    };
    Ok(f)
}
