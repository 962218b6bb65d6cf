//! Special-function kernels shared by the POVM and phase-space code.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Position-space Fock wavefunctions `⟨n|x⟩ = (2/π)^{1/4} e^{-x²} H_n(√2 x)/√(n! 2ⁿ)`
/// for `n < dim`, with quadrature `x = (a + a†)/2`.
pub fn fock_wavefunctions(x: f64, dim: usize) -> Vec<f64> {
    weighted_hermite(x, 0.25 * (2.0 / PI).ln() - x * x, dim)
}

/// `e^{log_weight} H_n(√2 t)/√(n! 2ⁿ)` for `n < dim`.
///
/// The recurrence runs on the normalized polynomials and carries a separate
/// log scale, so neither `H_n` nor the weight is ever formed on its own.
pub fn weighted_hermite(t: f64, log_weight: f64, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    if dim == 0 || log_weight == f64::NEG_INFINITY {
        return out;
    }
    let mut log_scale = log_weight;
    let (mut prev, mut cur) = (0.0f64, 1.0f64);
    out[0] = log_scale.exp();
    for n in 0..dim - 1 {
        let k = n as f64;
        let next = 2.0 * t / (k + 1.0).sqrt() * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs();
        if mag > 1e150 || (mag < 1e-150 && mag > 0.0) {
            cur /= mag;
            prev /= mag;
            log_scale += mag.ln();
        }
        out[n + 1] = cur * log_scale.exp();
    }
    out
}

/// Polynomial part `H_n(√2 t)/√(n! 2ⁿ)` for `n < dim`.
pub fn scaled_hermite(t: f64, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    if dim == 0 {
        return out;
    }
    out[0] = 1.0;
    if dim > 1 {
        out[1] = 2.0 * t;
    }
    for n in 1..dim.saturating_sub(1) {
        let k = n as f64;
        out[n + 1] = 2.0 * t / (k + 1.0).sqrt() * out[n] - (k / (k + 1.0)).sqrt() * out[n - 1];
    }
    out
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Exact Fock matrix elements `⟨n|D(β)|m⟩` for `n < rows`, `m < cols`.
///
/// Along each diagonal `n = m + k` the values are
/// `β^k e^{-|β|²/2} √(m!/(m+k)!) L_m^{(k)}(|β|²)`; the normalized Laguerre
/// functions obey a three-term recurrence whose iterates stay bounded by one.
/// Valid for `|β|² ≲ 1400` (beyond that the starting values underflow).
pub fn displacement_elements(beta: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(rows, cols);
    let r = beta.norm();
    let phase = if r > 0.0 { beta / r } else { Complex64::new(1.0, 0.0) };
    // lower triangle, n = m + k
    for k in 0..rows {
        let ph = phase.powu(k as u32);
        for (m, g) in laguerre_diagonal(r, k, cols.min(rows - k)).into_iter().enumerate() {
            out[(m + k, m)] = ph * g;
        }
    }
    // strictly upper: ⟨n|D(β)|n+k⟩ = (-1)^k conj(phase)^k g_n^k
    for k in 1..cols {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ph = phase.conj().powu(k as u32) * sign;
        for (n, g) in laguerre_diagonal(r, k, rows.min(cols - k)).into_iter().enumerate() {
            out[(n, n + k)] = ph * g;
        }
    }
    out
}

/// `|β|^k e^{-|β|²/2} √(m!/(m+k)!) L_m^{(k)}(|β|²)` for `m < len`.
fn laguerre_diagonal(r: f64, k: usize, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let y = r * r;
    let kf = k as f64;
    let g0 = if k == 0 {
        (-0.5 * y).exp()
    } else if r == 0.0 {
        0.0
    } else {
        (kf * r.ln() - 0.5 * y - 0.5 * ln_factorial(k)).exp()
    };
    let (mut prev, mut cur) = (0.0, g0);
    out.push(cur);
    for m in 0..len - 1 {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - y) * cur - (mf * (mf + kf)).sqrt() * prev)
            / ((mf + 1.0) * (mf + kf + 1.0)).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}
