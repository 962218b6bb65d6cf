//! Gaussian quadrature rules.
//!
//! Nodes come from the Golub-Welsch eigenproblem and are then polished with
//! Newton steps on the orthonormal recurrence, which keeps the weights
//! accurate to a few ulps even for a couple of hundred nodes.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Gauss-Hermite rule for `∫ e^{-u²} f(u) du` over the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Legendre rule for `∫_{-1}^{1} f(u) du`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn jacobi_eigen(n: usize, off: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        let b = off(i);
        jac[(i, i + 1)] = b;
        jac[(i + 1, i)] = b;
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jac).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    nodes
}

/// Orthonormal Hermite functions ψ_n(u) = H_n(u) e^{-u²/2} / sqrt(2^n n! sqrt(π)) at u,
/// returning (ψ_{n-1}, ψ_n).
fn hermite_pair(n: usize, u: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * u * u).exp();
    for k in 0..n {
        let next = u * (2.0 / (k as f64 + 1.0)).sqrt() * cur - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (prev, cur)
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Hermite rule needs at least one node");
        let mut nodes = jacobi_eigen(n, |i| ((i as f64 + 1.0) / 2.0).sqrt());
        let mut weights = Vec::with_capacity(n);
        for u in nodes.iter_mut() {
            // Newton on ψ_n; ψ_n' = sqrt(2n) ψ_{n-1} - u ψ_n
            for _ in 0..4 {
                let (pm, p) = hermite_pair(n, *u);
                let dp = (2.0 * n as f64).sqrt() * pm - *u * p;
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                *u -= step;
                if step.abs() < 1e-15 * u.abs().max(1.0) {
                    break;
                }
            }
            let (pm, _) = hermite_pair(n, *u);
            // w_i e^{-u²} = 1 / (n ψ_{n-1}(u)²)
            let w = if pm == 0.0 {
                0.0
            } else {
                (-(*u) * (*u)).exp() / (n as f64 * pm * pm)
            };
            weights.push(w);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^{-u²} f(u) du`
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * f(u)).sum()
    }

    /// Nodes and weights for the expectation over `N(mean, variance)`:
    /// `E[f] ≈ Σ w_i f(t_i)` with `Σ w_i = 1`.
    pub fn normal(&self, mean: f64, variance: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let scale = (2.0 * variance).sqrt();
        let norm = PI.sqrt().recip();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&u, &w)| (mean + scale * u, w * norm))
    }
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = jacobi_eigen(n, |i| {
            let k = i as f64 + 1.0;
            k / (4.0 * k * k - 1.0).sqrt()
        });
        let mut weights = Vec::with_capacity(n);
        for u in nodes.iter_mut() {
            let mut dp = 1.0;
            for _ in 0..4 {
                let (p, d) = legendre(n, *u);
                dp = d;
                let step = p / d;
                *u -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, *u);
            if d != 0.0 {
                dp = d;
            }
            weights.push(2.0 / ((1.0 - *u * *u) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&u, &w)| (mid + half * u, w * half))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.interval(a, b).map(|(t, w)| w * f(t)).sum()
    }
}

/// (P_n(u), P_n'(u))
fn legendre(n: usize, u: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = u;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * u * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (u * p1 - p0) / (u * u - 1.0);
    (p1, d)
}
