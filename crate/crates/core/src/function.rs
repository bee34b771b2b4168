//! Target functions with exact derivative evaluators.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function together with its a.e. derivatives up to a declared order.
///
/// `kinks` lists the points where some declared derivative jumps; quadrature
/// panels are aligned with them.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    value: RealFn,
    derivatives: Vec<RealFn>,
    kinks: Vec<f64>,
    counter: Option<Arc<AtomicUsize>>,
}

impl TestFunction {
    pub fn new(id: impl Into<String>, value: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        TestFunction {
            id: id.into(),
            value: Arc::new(value),
            derivatives: Vec::new(),
            kinks: Vec::new(),
            counter: None,
        }
    }

    /// Appends the next derivative (order `alpha_known() + 1`).
    pub fn with_derivative(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivatives.push(Arc::new(d));
        self
    }

    pub fn with_kinks(mut self, kinks: impl IntoIterator<Item = f64>) -> Self {
        self.kinks = kinks.into_iter().collect();
        self.kinks.sort_by(f64::total_cmp);
        self.kinks.dedup();
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Highest declared derivative order.
    pub fn alpha_known(&self) -> usize {
        self.derivatives.len()
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    /// Point evaluation. Counted when the function is instrumented.
    pub fn value(&self, x: f64) -> f64 {
        if let Some(c) = &self.counter {
            c.fetch_add(1, Ordering::Relaxed);
        }
        (self.value)(x)
    }

    /// `f^{(order)}(x)`; order 0 is the value itself (not counted).
    pub fn derivative(&self, order: usize, x: f64) -> Result<f64> {
        match order {
            0 => Ok((self.value)(x)),
            k if k <= self.derivatives.len() => Ok((self.derivatives[k - 1])(x)),
            k => Err(Error::MissingDerivative {
                id: self.id.clone(),
                known: self.derivatives.len(),
                requested: k,
            }),
        }
    }

    pub(crate) fn require_order(&self, order: usize) -> Result<()> {
        self.derivative(order, 0.0).map(|_| ())
    }

    /// A copy whose [`value`](Self::value) calls are tallied by the returned counter.
    pub fn instrumented(&self) -> (TestFunction, EvalCounter) {
        let counter = Arc::new(AtomicUsize::new(0));
        let mut f = self.clone();
        f.counter = Some(counter.clone());
        (f, EvalCounter(counter))
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("alpha_known", &self.alpha_known())
            .field("kinks", &self.kinks)
            .finish()
    }
}

/// Handle on the evaluation count of an instrumented [`TestFunction`].
#[derive(Debug, Clone)]
pub struct EvalCounter(Arc<AtomicUsize>);

impl EvalCounter {
    pub fn count(&self) -> usize {
        self.0.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.0.store(0, Ordering::Relaxed);
    }
}
