//! Gauss–Legendre rules on `[-1, 1]`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{usage, Result};

/// Largest order accepted by [`gauss_legendre`].
pub const MAX_ORDER: usize = 16_384;

/// Nodes and weights of an `order`-point Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Abscissae in strictly increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{-1}^{1} f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫_a^b f(x) dx` through the affine map of the rule onto `[a, b]`.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        half * self.integrate(|x| f(mid + half * x))
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// Legendre `P_n(x)` and its derivative by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n_f = n as f64;
    let dp = n_f * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Builds the `order`-point Gauss–Legendre rule by Newton iteration on the
/// Legendre roots.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return usage(format!(
            "Gauss-Legendre order must lie in 1..={MAX_ORDER}, got {order}"
        ));
    }
    if order == 1 {
        return Ok(QuadratureRule {
            nodes: vec![0.0],
            weights: vec![2.0],
        });
    }
    let n = order;
    let n_f = n as f64;
    let half = n / 2;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..half {
        // Tricomi's initial guess for the i-th largest root.
        let theta = PI * (i as f64 + 0.75) / (n_f + 0.5);
        let mut x = (1.0 - (n_f - 1.0) / (8.0 * n_f * n_f * n_f)) * theta.cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[half] = 0.0;
        weights[half] = 2.0 / (d * d);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Process-wide cache of rules; construction at high order is quadratic in
/// the order.
pub fn gauss_legendre_shared(order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&order) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_legendre(order)?);
    cache
        .lock()
        .expect("quadrature cache poisoned")
        .entry(order)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}
