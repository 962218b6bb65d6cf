//! Continuous-variable teleportation as heterodyne conditioning plus
//! displacement feedback, and its equivalent Gaussian noise channel.

use crate::conditional::unnormalized_conditional;
use crate::error::{Error, Result};
use crate::fock::{add_gaussian_noise, moments, FockOperator, TruncationConfig, TwinBeamParams};
use crate::povm::{heterodyne_noise_variance, HeterodyneDetector};
use crate::quadrature::GaussHermite;
use crate::special::displacement_elements;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Trace-distance movement at which node doubling stops.
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
const NODE_SCHEDULE: [usize; 6] = [16, 24, 32, 48, 64, 96];
const PRUNE: f64 = 1e-20;

/// Twin-beam photons `N`, loss exposure `Γt`, thermal background `M`, and
/// heterodyne efficiency `η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub photons: f64,
    pub gamma_t: f64,
    pub thermal: f64,
    pub eta: f64,
}

impl ChannelParams {
    pub fn new(photons: f64, gamma_t: f64, thermal: f64, eta: f64) -> Result<Self> {
        for (name, v) in [("N", photons), ("gamma_t", gamma_t), ("M", thermal)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("{v} must be finite and >= 0")));
            }
        }
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::param("eta", format!("{eta} not in (0, 1]")));
        }
        Ok(Self { photons, gamma_t, thermal, eta })
    }

    /// Lossless, ideal detection.
    pub fn ideal(photons: f64) -> Result<Self> {
        Self::new(photons, 0.0, 0.0, 1.0)
    }

    pub fn twb(&self) -> TwinBeamParams {
        TwinBeamParams::from_photons(self.photons).expect("validated photon number")
    }

    /// `K₀ = 1 + N - √(N(N+2))`, written to avoid cancellation at large N.
    pub fn k0(&self) -> f64 {
        background_photons(self.photons)
    }

    /// Drift `γ = 1/(2M+1)`.
    pub fn drift(&self) -> f64 {
        1.0 / (2.0 * self.thermal + 1.0)
    }

    /// Rescaled time `τ = Γt/γ`.
    pub fn rescaled_time(&self) -> f64 {
        self.gamma_t / self.drift()
    }

    /// Green-function width `D² = (1 - e^{-γτ})/(4γ)`.
    pub fn diffusion(&self) -> f64 {
        -(-self.gamma_t).exp_m1() / (4.0 * self.drift())
    }

    pub fn detector_noise(&self) -> f64 {
        heterodyne_noise_variance(self.eta)
    }
}

/// `K₀ = 1 + N - √(N(N+2)) = 1/(1 + N + √(N(N+2)))`.
pub fn background_photons(photons: f64) -> f64 {
    1.0 / (1.0 + photons + (photons * (photons + 2.0)).sqrt())
}

/// `K = K₀e^{Γt} + (2M+1)(e^{Γt} - 1) + (1-η)/η`.
pub fn effective_k(p: &ChannelParams) -> f64 {
    let e = p.gamma_t.exp();
    p.k0() * e + (2.0 * p.thermal + 1.0) * p.gamma_t.exp_m1() + p.detector_noise()
}

/// Twin-beam variances after loss, `σ±² → e^{γτ}(σ±² + D²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolvedTwb {
    pub sigma_plus_sq: f64,
    pub sigma_minus_sq: f64,
}

impl EvolvedTwb {
    /// Split into a pure twin-beam with quadrature variance `c` added to each
    /// mode. Returns `(twb, c)`.
    pub fn decompose(&self) -> Result<(TwinBeamParams, f64)> {
        let gap = self.sigma_plus_sq - self.sigma_minus_sq;
        let pure_minus = 0.5 * (gap * gap + 0.25).sqrt() - 0.5 * gap;
        let c = self.sigma_minus_sq - pure_minus;
        if c < -1e-14 {
            return Err(Error::InvalidOperator {
                expected: "physical two-mode Gaussian",
                reason: format!("σ₊²σ₋² = {} below 1/16", self.sigma_plus_sq * self.sigma_minus_sq),
            });
        }
        // 4σ₋² = K₀ of the pure part
        let k0 = 4.0 * pure_minus;
        let photons = (1.0 - k0).powi(2) / (2.0 * k0);
        Ok((TwinBeamParams::from_photons(photons)?, if c < 1e-14 { 0.0 } else { c }))
    }
}

pub fn evolve_twb_loss(p: &ChannelParams) -> EvolvedTwb {
    let twb = p.twb();
    let (e, d2) = (p.gamma_t.exp(), p.diffusion());
    EvolvedTwb {
        sigma_plus_sq: e * (twb.sigma_plus_sq() + d2),
        sigma_minus_sq: e * (twb.sigma_minus_sq() + d2),
    }
}

/// Variances obtained by convolving the twin-beam Wigner function with the
/// loss Green functions, `σ±² → e^{-γτ}σ±² + D²`.
pub fn green_function_variances(p: &ChannelParams) -> EvolvedTwb {
    let twb = p.twb();
    let (e, d2) = ((-p.gamma_t).exp(), p.diffusion());
    EvolvedTwb {
        sigma_plus_sq: e * twb.sigma_plus_sq() + d2,
        sigma_minus_sq: e * twb.sigma_minus_sq() + d2,
    }
}

/// Noise photons of a unit-gain teleporter built on the Green-function
/// evolved beam: `K₀e^{-Γt} + (2M+1)(1 - e^{-Γt}) + (1-η)/η`.
pub fn green_function_k(p: &ChannelParams) -> f64 {
    4.0 * green_function_variances(p).sigma_minus_sq + p.detector_noise()
}

pub fn coherent_fidelity(p: &ChannelParams) -> f64 {
    1.0 / (1.0 + effective_k(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlocalityBound {
    pub satisfied: bool,
    pub k: f64,
    pub max_k: f64,
}

/// `F > 1/2`, equivalently `K < 1`.
pub fn nonlocality_bound(p: &ChannelParams) -> NonlocalityBound {
    let k = effective_k(p);
    NonlocalityBound { satisfied: k < 1.0, k, max_k: 1.0 }
}

/// Right-hand side of the photon bound, `R = e^{-Γt}[1 - D_η² - (2M+1)(e^{Γt} - 1)]`;
/// the bound holds iff `K₀ < R`.
pub fn nonlocality_margin(gamma_t: f64, thermal: f64, eta: f64) -> f64 {
    (-gamma_t).exp() * (1.0 - heterodyne_noise_variance(eta) - (2.0 * thermal + 1.0) * gamma_t.exp_m1())
}

/// Photon number above which the bound holds, `(1-R)²/(2R)`, or `None`
/// when no twin-beam can beat the noise.
pub fn min_photons_for_nonlocality(gamma_t: f64, thermal: f64, eta: f64) -> Option<f64> {
    let r = nonlocality_margin(gamma_t, thermal, eta);
    (r > 0.0).then(|| (1.0 - r).powi(2) / (2.0 * r))
}

fn check_input(input: &FockOperator) -> Result<()> {
    input.validate_state(1e-6)
}

/// Tensor grid of two 1D rules, dropping nodes whose weight is below
/// `PRUNE` times the largest.
fn product_nodes(xs: &[(f64, f64)], ys: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
    let wmax = xs.iter().map(|n| n.1).fold(0.0, f64::max) * ys.iter().map(|n| n.1).fold(0.0, f64::max);
    xs.iter()
        .flat_map(|&(x, wx)| ys.iter().map(move |&(y, wy)| (x, y, wx * wy)))
        .filter(|n| n.2 > PRUNE * wmax)
        .collect()
}

/// Doubles the node count along `NODE_SCHEDULE` until successive results move
/// by less than [`QUADRATURE_TOLERANCE`] in trace distance.
fn adaptive<F>(what: &'static str, mut eval: F) -> Result<FockOperator>
where
    F: FnMut(usize) -> Result<FockOperator>,
{
    let mut prev = eval(NODE_SCHEDULE[0])?;
    for &n in &NODE_SCHEDULE[1..] {
        let next = eval(n)?;
        let moved = next.trace_distance(&prev)?;
        if moved < QUADRATURE_TOLERANCE {
            return Ok(next);
        }
        log::debug!("{what}: {n} nodes moved {moved:e}");
        prev = next;
    }
    Err(Error::Convergence {
        what,
        detail: format!("node count {} not converged", NODE_SCHEDULE[NODE_SCHEDULE.len() - 1]),
    })
}

/// Gaussian channel `σ = ∫ d²α/(πK) e^{-|α|²/K} D(α) S D†(α)` on `trunc.dim` levels.
///
/// Two-dimensional Gauss-Hermite over `α`. The displaced input carries a factor
/// `e^{-|α|²}` which is folded into the quadrature weight, leaving a polynomial
/// integrand.
pub fn teleport_state(input: &FockOperator, k: f64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::param("K", "must be finite and >= 0"));
    }
    check_input(input)?;
    let (d_in, d_out) = (input.dim(), trunc.dim);
    if k == 0.0 {
        return Ok(input.resized(d_out));
    }
    let var = k / (2.0 * (1.0 + k));
    let scale = 2.0 * var / k;
    let rho = input.matrix();
    adaptive("Gaussian channel quadrature", |n| {
        let gh = GaussHermite::new(n);
        let axis: Vec<(f64, f64)> = gh.normal(0.0, var).collect();
        let nodes = product_nodes(&axis, &axis);
        let m = nodes
            .par_iter()
            .map(|&(x, y, w)| {
                let a = Complex64::new(x, y);
                let b = displacement_elements(a, d_out, d_in);
                &b * rho * b.adjoint() * Complex64::new(w * scale * a.norm_sqr().exp(), 0.0)
            })
            .reduce(|| DMatrix::zeros(d_out, d_out), |a, b| a + b);
        Ok(FockOperator::from_matrix_unchecked(m))
    })
}

/// The same channel in closed form: pure loss then quantum-limited amplification.
pub fn teleport_state_kraus(input: &FockOperator, k: f64, trunc: &TruncationConfig) -> Result<FockOperator> {
    check_input(input)?;
    add_gaussian_noise(input, k, trunc.dim)
}

/// Coherent input `|z⟩`: the output is a displaced thermal state with `K` photons.
pub fn teleport_coherent(z: Complex64, k: f64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::param("K", "must be finite and >= 0"));
    }
    let d = trunc.dim;
    // ⟨m|D(z) ν D†(z)|n⟩ with ν thermal; the thermal ladder is summed until its tail is negligible
    let q = k / (1.0 + k);
    let mut levels = d;
    while levels < 10_000 && q.powi(levels as i32) > 1e-17 {
        levels += d;
    }
    let b = displacement_elements(z, d, levels);
    let diag = DMatrix::from_fn(levels, levels, |i, j| {
        if i == j {
            Complex64::new(q.powi(i as i32) / (1.0 + k), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(FockOperator::from_matrix_unchecked(&b * diag * b.adjoint()))
}

/// Full protocol: heterodyne on the sender's beam against the input as
/// reference, feedback `D(-ᾱ)` on the receiver's beam, average over outcomes.
///
/// Losses enter through the evolved twin-beam, written as a pure twin-beam with
/// independent Gaussian noise on both beams. Noise on the sender's beam is
/// absorbed into the heterodyne smearing; noise on the receiver's beam is
/// applied to the output in Kraus form.
pub fn teleport_via_conditioning(input: &FockOperator, p: &ChannelParams, trunc: &TruncationConfig) -> Result<FockOperator> {
    check_input(input)?;
    let (twb, c) = evolve_twb_loss(p).decompose()?;
    let smear = p.detector_noise() + 2.0 * c;
    let eta_eff = 1.0 / (1.0 + smear);
    let d_tw = TruncationConfig::for_twb(&twb, 1e-15)?.dim.max(input.dim());
    let tw_trunc = TruncationConfig::new(d_tw, 1e-15)?;
    let d_out = trunc.dim;

    let m = moments(input);
    let spread = 0.25 * (1.0 + twb.photons()) + 0.5 * m.mean_photons + 0.25 + 0.5 * smear;
    let centre = m.mean_a;
    let detector = HeterodyneDetector::new(input, eta_eff, &tw_trunc)?;
    let average = adaptive("teleportation outcome average", |n| {
        let gh = GaussHermite::new(n);
        // p_α is centred near the conjugate of the input amplitude
        let xs: Vec<(f64, f64)> = gh.normal(centre.re, spread).collect();
        let ys: Vec<(f64, f64)> = gh.normal(-centre.im, spread).collect();
        let pdf = |x: f64, mu: f64| (-(x - mu).powi(2) / (2.0 * spread)).exp() / (2.0 * PI * spread).sqrt();
        let m = product_nodes(&xs, &ys)
            .par_iter()
            .map(|&(x, y, w)| -> Result<DMatrix<Complex64>> {
                let alpha = Complex64::new(x, y);
                let el = detector.element(alpha)?;
                let raw = unnormalized_conditional(&twb, &el)?;
                let b = displacement_elements(-alpha.conj(), d_out, d_tw);
                let weight = w / (pdf(x, centre.re) * pdf(y, -centre.im));
                Ok(&b * raw.matrix() * b.adjoint() * Complex64::new(weight, 0.0))
            })
            .try_reduce(|| DMatrix::zeros(d_out, d_out), |a, b| Ok(a + b))?;
        Ok(FockOperator::from_matrix_unchecked(m))
    })?;
    if c == 0.0 {
        return Ok(average);
    }
    add_gaussian_noise(&average, 2.0 * c, d_out)
}
