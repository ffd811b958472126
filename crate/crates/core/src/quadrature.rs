//! Gauss–Legendre rules and the square-root-edge rule built on them.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

/// Default node count for discretizing continuous parts.
pub const DEFAULT_NODES: usize = 2048;

/// Gauss–Legendre rule on `[-1, 1]`, nodes stored by angle so that distances
/// to the endpoints keep full relative precision.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    /// `x_k = cos(theta_k)`, descending in `x`.
    thetas: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut thetas = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for k in 0..n.div_ceil(2) {
            let mut theta = PI * (k as f64 + 0.75) / (nf + 0.5);
            let mut dp = 1.0;
            for _ in 0..100 {
                let x = theta.cos();
                let (p, p_prev) = legendre_pair(n, x);
                // d/dtheta P_n(cos theta)
                dp = nf * (x * p - p_prev) / theta.sin();
                let step = p / dp;
                theta -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / (dp * dp);
            thetas[k] = theta;
            weights[k] = w;
            thetas[n - 1 - k] = PI - theta;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            thetas[n / 2] = FRAC_PI_2;
        }
        GaussLegendre { thetas, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        self.thetas.iter().map(|t| t.cos())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = NeumaierSum::default();
        for (x, w) in self.nodes().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        acc.value() * half
    }
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Shared, lazily built rule with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
}

/// One node of a square-root-edge rule on `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeNode {
    pub x: f64,
    /// `x - a`, accurate near the left edge.
    pub left: f64,
    /// `b - x`, accurate near the right edge.
    pub right: f64,
    /// Weight such that `Σ weight·g(x) ≈ ∫ sqrt((x-a)(b-x)) g(x) dx`.
    pub weight: f64,
}

/// Nodes for `∫_a^b sqrt((x-a)(b-x)) g(x) dx` after `x = a + (b-a) sin²φ`,
/// which turns the square-root edges into a smooth periodic-like integrand.
pub fn sqrt_edge_rule(a: f64, b: f64, n: usize) -> Vec<EdgeNode> {
    let gl = gauss_legendre(n);
    let width = b - a;
    gl.thetas
        .iter()
        .zip(gl.weights())
        .map(|(&theta, &w)| {
            // u = cos(theta), phi = (pi/4)(1+u) = (pi/2) cos²(theta/2)
            let half = 0.5 * theta;
            let phi = FRAC_PI_2 * half.cos().powi(2);
            let phi_c = FRAC_PI_2 * half.sin().powi(2);
            let left = width * phi.sin().powi(2);
            let right = width * phi_c.sin().powi(2);
            let x = if left <= right { a + left } else { b - right };
            EdgeNode { x, left, right, weight: FRAC_PI_2 * w * left * right }
        })
        .collect()
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}
