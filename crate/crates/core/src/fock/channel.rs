//! Additive Gaussian noise in Kraus form.

use super::FockOperator;
use crate::error::{Error, Result};
use crate::special::ln_factorial;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

// `x ln y` with `0 ln 0 = 0`
fn xlny(x: usize, ln_y: f64) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * ln_y
    }
}

/// Classical additive noise `ρ ↦ ∫ d²α/(πk) e^{-|α|²/k} D(α)ρD†(α)`, which
/// adds `k` photons and `k/2` to each quadrature variance (vacuum variance ¼).
///
/// Evaluated exactly as a pure-loss channel with transmissivity `1/(1+k)`
/// followed by a quantum-limited amplifier of gain `1+k`. The output is
/// returned on `out_dim` levels; mass beyond is discarded, so its trace shows
/// how much was lost.
pub fn add_gaussian_noise(state: &FockOperator, k: f64, out_dim: usize) -> Result<FockOperator> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::param("k", "must be finite and >= 0"));
    }
    if out_dim == 0 {
        return Err(Error::param("out_dim", "must be positive"));
    }
    if k == 0.0 {
        return Ok(state.resized(out_dim));
    }
    let d = state.dim();
    let rho = state.matrix();
    let t = 1.0 / (1.0 + k);
    let (ln_t, ln_1t) = (t.ln(), (1.0 - t).ln());

    // attenuation: ρ'_{ij} = Σ_l c(i+l,l) c(j+l,l) ρ_{i+l,j+l}
    let ln_c = |n: usize, l: usize| 0.5 * (ln_binomial(n, l) + xlny(n - l, ln_t) + xlny(l, ln_1t));
    let mut att = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..d - i.max(j) {
                let w = (ln_c(i + l, l) + ln_c(j + l, l)).exp();
                acc += rho[(i + l, j + l)] * w;
            }
            att[(i, j)] = acc;
        }
    }

    // amplification: ρ''_{ij} = Σ_l b(i-l,l) b(j-l,l) ρ'_{i-l,j-l}
    let g = 1.0 + k;
    let (ln_g, ln_1g) = (g.ln(), (1.0 - 1.0 / g).ln());
    let ln_b = |n: usize, l: usize| 0.5 * (ln_binomial(n + l, l) - (n + 1) as f64 * ln_g + xlny(l, ln_1g));
    let mut out = DMatrix::<Complex64>::zeros(out_dim, out_dim);
    for i in 0..out_dim {
        for j in 0..out_dim {
            let mut acc = Complex64::new(0.0, 0.0);
            let lo = i.max(j).saturating_sub(d - 1);
            for l in lo..=i.min(j) {
                let w = (ln_b(i - l, l) + ln_b(j - l, l)).exp();
                acc += att[(i - l, j - l)] * w;
            }
            out[(i, j)] = acc;
        }
    }
    Ok(FockOperator::from_matrix_unchecked(out))
}
