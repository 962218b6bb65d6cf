//! Closed-form results for twin-beam conditioning, evaluated directly.

use crate::error::{Error, Result};
use crate::povm::homodyne_noise_variance;
#[cfg(test)]
use crate::special::ln_factorial;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn check_photons(n: f64) -> Result<()> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::param("N", format!("{n} must be finite and >= 0")));
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("{eta} not in (0, 1]")));
    }
    Ok(())
}

/// Click probability `ηN/(2+ηN)` of an on/off detector on one twin-beam arm.
pub fn click_probability(n: f64, eta: f64) -> Result<f64> {
    check_photons(n)?;
    check_eta(eta)?;
    Ok(eta * n / (2.0 + eta * n))
}

/// Fano factor of the state heralded by a click,
/// `½(2+N)[1 + 2/(2+Nη) - 4(2+N)/(4+N(4+Nη))]`.
pub fn onoff_fano(n: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::param("N", "a click requires N > 0"));
    }
    Ok(0.5 * (2.0 + n) * (1.0 + 2.0 / (2.0 + n * eta) - 4.0 * (2.0 + n) / (4.0 + n * (4.0 + n * eta))))
}

/// The first-order form `N/2 + N(N-2)/(N+2)² (1-η)` quoted for η near one.
///
/// Its correction term has the opposite sign to the η-derivative of
/// [`onoff_fano`] at η = 1; see [`onoff_fano_slope`].
pub fn onoff_fano_asymptotic(n: f64, eta: f64) -> Result<f64> {
    check_photons(n)?;
    check_eta(eta)?;
    Ok(0.5 * n + n * (n - 2.0) / ((n + 2.0) * (n + 2.0)) * (1.0 - eta))
}

/// Exact coefficient of `(1-η)` in the expansion of [`onoff_fano`] about
/// η = 1, `-N(N-2)/(N+2)²`.
pub fn onoff_fano_slope(n: f64) -> f64 {
    -n * (n - 2.0) / ((n + 2.0) * (n + 2.0))
}

/// Wigner function at the origin of the click-heralded state,
/// `-(2/π) (1/(N+1)) (2+ηN)/(2(1+N)-ηN)`.
pub fn onoff_wigner_origin(n: f64, eta: f64) -> Result<f64> {
    check_photons(n)?;
    check_eta(eta)?;
    Ok(-2.0 / PI / (n + 1.0) * (2.0 + eta * n) / (2.0 * (1.0 + n) - eta * n))
}

/// s-ordered quasi-probability at the origin of the click-heralded state,
/// `-2(1+s)(2+ηN) / (π(1+N-s)[2(1+N-s) - ηN(1+s)])`, for `s ∈ (-1, 0]`.
pub fn s_wigner_origin_onoff(n: f64, eta: f64, s: f64) -> Result<f64> {
    check_photons(n)?;
    check_eta(eta)?;
    if !(s > -1.0 && s <= 0.0) {
        return Err(Error::param("s", format!("{s} not in (-1, 0]")));
    }
    let a = 1.0 + n - s;
    Ok(-2.0 * (1.0 + s) * (2.0 + eta * n) / (PI * a * (2.0 * a - eta * n * (1.0 + s))))
}

/// Variances of homodyne detection on one twin-beam arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomodyneStats {
    /// Marginal quadrature variance `(1+N)/4`.
    pub sigma_lambda_sq: f64,
    /// Detector smearing `(1-η)/(4η)`.
    pub delta_eta_sq: f64,
    /// Total `σ_λ² + Δ_η²`.
    pub delta_lambda_eta_sq: f64,
}

impl HomodyneStats {
    pub fn new(n: f64, eta: f64) -> Result<Self> {
        check_photons(n)?;
        check_eta(eta)?;
        let s = 0.25 * (1.0 + n);
        let d = homodyne_noise_variance(eta);
        Ok(Self {
            sigma_lambda_sq: s,
            delta_eta_sq: d,
            delta_lambda_eta_sq: s + d,
        })
    }

    /// Outcome density, Gaussian with variance `Δ²_{λη}`.
    pub fn density(&self, x: f64) -> f64 {
        let v = self.delta_lambda_eta_sq;
        (-x * x / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
    }

    /// Bin-averaged density `[Erf((x+δ/2)/√(2Δ²)) - Erf((x-δ/2)/√(2Δ²))]/(2δ)`.
    pub fn density_binned(&self, x: f64, delta: f64) -> Result<f64> {
        if !(delta >= 0.0) {
            return Err(Error::param("delta", "must be >= 0"));
        }
        if delta == 0.0 {
            return Ok(self.density(x));
        }
        let s = (2.0 * self.delta_lambda_eta_sq).sqrt();
        Ok((libm::erf((x + 0.5 * delta) / s) - libm::erf((x - 0.5 * delta) / s)) / (2.0 * delta))
    }

    /// Second-order Taylor expansion `P_x [1 + (x²-Δ²)δ²/(24Δ⁴)]` of the
    /// binned density.
    pub fn density_binned_expansion(&self, x: f64, delta: f64) -> f64 {
        let v = self.delta_lambda_eta_sq;
        self.density(x) * (1.0 + (x * x - v) / (24.0 * v * v) * delta * delta)
    }

    /// The expansion in the form `P_x [1 - (x²-Δ²)δ²/(24Δ²)]`, whose
    /// correction has the wrong sign and scale against
    /// [`density_binned`](Self::density_binned).
    pub fn density_binned_expansion_as_printed(&self, x: f64, delta: f64) -> f64 {
        let v = self.delta_lambda_eta_sq;
        self.density(x) * (1.0 - (x * x - v) / (24.0 * v) * delta * delta)
    }
}

/// The conditional state after homodyne outcome `x` is a displaced squeezed
/// thermal state; this is its parametrization and quadrature variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingReport {
    pub alpha_eta: f64,
    pub zeta_eta: f64,
    pub n_th: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub is_squeezed: bool,
}

pub fn conditional_squeezing(x: f64, n: f64, eta: f64) -> Result<SqueezingReport> {
    check_photons(n)?;
    check_eta(eta)?;
    let en = eta * n;
    let var_x = (1.0 + n * (1.0 - eta)) / (4.0 * (1.0 + en));
    let var_y = 0.25 * (1.0 + n);
    let n_th = 0.5 * (((1.0 + n) * (1.0 + n * (1.0 - eta)) / (1.0 + en)).sqrt() - 1.0);
    Ok(SqueezingReport {
        alpha_eta: eta * (n * (n + 2.0)).sqrt() / (1.0 + en) * x,
        zeta_eta: 0.25 * ((1.0 + n) * (1.0 + en) / (1.0 + n * (1.0 - eta))).ln(),
        n_th: n_th.max(0.0),
        var_x,
        var_y,
        is_squeezed: var_x < 0.25,
    })
}

/// Mean photon number `x² N(N+2)/(1+N)² + N²/(4(1+N))` of the state
/// conditioned on ideal homodyne outcome `x`.
pub fn conditional_photon_number(x: f64, n: f64) -> Result<f64> {
    check_photons(n)?;
    Ok(x * x * n * (n + 2.0) / ((1.0 + n) * (1.0 + n)) + 0.25 * n * n / (1.0 + n))
}

/// Outcome average of [`conditional_photon_number`],
/// `N²/(4(1+N)) + σ_λ² N(N+2)/(1+N)²`, which collapses to `N/2`.
pub fn energy_average(n: f64) -> Result<f64> {
    check_photons(n)?;
    let s = 0.25 * (1.0 + n);
    Ok(0.25 * n * n / (1.0 + n) + s * n * (n + 2.0) / ((1.0 + n) * (1.0 + n)))
}

/// `λ^{n+m}/√(n!m!2^{n+m}) Σ_k 2^k k! C(m,k) C(n,k) η^{(m+n)/2-k} H_{m+n-2k}(√(2η)x)`.
///
/// The k-sum is the two-index Hermite polynomial with generating function
/// `exp(2y√η(s+t) - η(s²+t²) + 2(1-η)st)`, `y = √(2η)x`, evaluated through its
/// normalized recurrence in the first index; the explicit sum cancels
/// catastrophically beyond a few dozen photons.
fn widetext_sum(n: usize, m: usize, x: f64, lambda_sq: f64, eta: f64) -> f64 {
    let (lo, hi) = (n.min(m), n.max(m));
    let t = eta.sqrt() * x;
    let y = 2f64.sqrt() * t;
    // row r holds T_{r,c} for c ≤ hi; T_{0,c} = η^{c/2} H_c(y)/√(c!2^c)
    let h = crate::special::scaled_hermite(t, hi + 1);
    let mut prev: Vec<f64> = vec![0.0; hi + 1];
    let mut cur: Vec<f64> = (0..=hi).map(|c| eta.powf(0.5 * c as f64) * h[c]).collect();
    for r in 0..lo {
        let rf = r as f64;
        let mut next = vec![0.0; hi + 1];
        for c in 0..=hi {
            let mut v = y * (2.0 * eta / (rf + 1.0)).sqrt() * cur[c];
            if r > 0 {
                v -= eta * (rf / (rf + 1.0)).sqrt() * prev[c];
            }
            if c > 0 {
                v += (1.0 - eta) * (c as f64 / (rf + 1.0)).sqrt() * cur[c - 1];
            }
            next[c] = v;
        }
        prev = cur;
        cur = next;
    }
    lambda_sq.powf(0.5 * (n + m) as f64) * cur[hi]
}

#[cfg(test)]
fn widetext_sum_explicit(n: usize, m: usize, x: f64, lambda_sq: f64, eta: f64) -> f64 {
    let t = eta.sqrt() * x;
    let h = crate::special::scaled_hermite(t, n + m + 1);
    let ln2 = 2f64.ln();
    let base = 0.5 * (n + m) as f64 * lambda_sq.ln() - 0.5 * (ln_factorial(n) + ln_factorial(m) + (n + m) as f64 * ln2);
    (0..=n.min(m))
        .map(|k| {
            let j = n + m - 2 * k;
            let ln_binom = |a: usize| ln_factorial(a) - ln_factorial(k) - ln_factorial(a - k);
            let ln = base + k as f64 * ln2 + ln_factorial(k) + ln_binom(m) + ln_binom(n)
                + (0.5 * (m + n) as f64 - k as f64) * eta.ln()
                + 0.5 * (ln_factorial(j) + j as f64 * ln2);
            h[j] * ln.exp()
        })
        .sum()
}

fn widetext_common(n: usize, m: usize, x: f64, photons: f64, eta: f64) -> Result<(f64, f64)> {
    check_photons(photons)?;
    check_eta(eta)?;
    let l2 = photons / (photons + 2.0);
    let gauss = (-4.0 * x * x * eta * eta * l2 / (1.0 - l2 * (1.0 - 2.0 * eta))).exp();
    let value = if l2 == 0.0 {
        if n == 0 && m == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (1.0 - l2) * gauss * widetext_sum(n, m, x, l2, eta)
    };
    Ok((value, l2))
}

/// `⟨n|ϱ_{xη}|m⟩` of the state conditioned on homodyne outcome `x` at
/// efficiency η, in closed form with prefactor `√((1-λ²(1-2η))/(1-λ²))`.
pub fn homodyne_matrix_element(n: usize, m: usize, x: f64, photons: f64, eta: f64) -> Result<f64> {
    let (v, l2) = widetext_common(n, m, x, photons, eta)?;
    if l2 == 0.0 {
        return Ok(v);
    }
    Ok(v * ((1.0 - l2 * (1.0 - 2.0 * eta)) / (1.0 - l2)).sqrt())
}

/// The same closed form with the prefactor `√(η(2-η(1-λ²))/(1-λ²))`, which
/// differs from [`homodyne_matrix_element`] by an x-independent constant when
/// η < 1.
pub fn homodyne_matrix_element_as_printed(n: usize, m: usize, x: f64, photons: f64, eta: f64) -> Result<f64> {
    let (v, l2) = widetext_common(n, m, x, photons, eta)?;
    if l2 == 0.0 {
        return Ok(v);
    }
    Ok(v * (eta * (2.0 - eta * (1.0 - l2)) / (1.0 - l2)).sqrt())
}

/// Finite-resolution squeezing for homodyne bins of width δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinnedSqueezing {
    /// Second-order x-variance in the form `Δx² + x²δ²/12 · η²N(N+2)/(1+ηN)²`,
    /// from which `x_δ` and `Q_δ` follow.
    pub var_x_delta: f64,
    /// Exact x-variance of the bin-conditioned mixture, `Δx² + κ² Var(t | bin)`
    /// with `κ = η√(N(N+2))/(1+ηN)`; close to `Δx² + κ²δ²/12` for any x.
    pub var_x_delta_exact: f64,
    /// Largest |x| still squeezed; `None` when η ≤ ½.
    pub x_delta: Option<f64>,
    /// Probability `Erf(g/δ)` of a squeezed outcome (0 for N = 0 or η ≤ ½).
    pub q_delta: f64,
    /// `g(η,N) = √(6(2η-1)/(η(N+2)))`; `None` when η ≤ ½.
    pub g: Option<f64>,
}

/// Squeezing left after binning outcomes into width-δ intervals centred on x.
pub fn binned_squeezing(x: f64, n: f64, eta: f64, delta: f64) -> Result<BinnedSqueezing> {
    check_photons(n)?;
    check_eta(eta)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", "must be positive"));
    }
    let rep = conditional_squeezing(x, n, eta)?;
    let en = eta * n;
    let slope_sq = eta * eta * n * (n + 2.0) / ((1.0 + en) * (1.0 + en));
    let var_x_delta = rep.var_x + x * x * delta * delta / 12.0 * slope_sq;

    // the bin mixes conditional states whose x-means are slope·t, t drawn from
    // the outcome Gaussian restricted to the bin
    let stats = HomodyneStats::new(n, eta)?;
    let var_t = truncated_normal_variance(stats.delta_lambda_eta_sq.sqrt(), x - 0.5 * delta, x + 0.5 * delta);
    let var_x_delta_exact = rep.var_x + slope_sq * var_t;

    let (x_delta, g) = if eta > 0.5 && n > 0.0 {
        let xd = (3.0 * (1.0 + en) * (2.0 * eta - 1.0) / (eta * eta * (n + 2.0))).sqrt() / delta;
        (Some(xd), Some(squeezing_margin(eta, n)))
    } else if eta > 0.5 {
        (None, Some(squeezing_margin(eta, n)))
    } else {
        (None, None)
    };
    let q_delta = match g {
        Some(g) if n > 0.0 => libm::erf(g / delta),
        _ => 0.0,
    };
    Ok(BinnedSqueezing {
        var_x_delta,
        var_x_delta_exact,
        x_delta,
        q_delta,
        g,
    })
}

/// `g(η,N) = √(6(2η-1)/(η(N+2)))`, NaN for η < ½.
pub fn squeezing_margin(eta: f64, n: f64) -> f64 {
    (6.0 * (2.0 * eta - 1.0) / (eta * (n + 2.0))).sqrt()
}

/// Exact `∫_{-x_δ}^{x_δ} P_{xη}(δ) dx` of the bin-averaged density.
pub fn squeezed_probability_exact(n: f64, eta: f64, delta: f64) -> Result<f64> {
    let b = binned_squeezing(0.0, n, eta, delta)?;
    let Some(xd) = b.x_delta else { return Ok(0.0) };
    let stats = HomodyneStats::new(n, eta)?;
    let gl = crate::quadrature::GaussLegendre::new(200);
    let mut total = 0.0;
    let pieces = 40;
    let h = 2.0 * xd / pieces as f64;
    for i in 0..pieces {
        let a = -xd + i as f64 * h;
        total += gl.integrate(a, a + h, |x| stats.density_binned(x, delta).unwrap_or(0.0));
    }
    Ok(total)
}

/// Variance of `N(0, σ²)` restricted to `[a, b]`.
fn truncated_normal_variance(sigma: f64, a: f64, b: f64) -> f64 {
    let (za, zb) = (a / sigma, b / sigma);
    let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let z = 0.5 * (libm::erf(zb / 2f64.sqrt()) - libm::erf(za / 2f64.sqrt()));
    if z <= 0.0 {
        // bin far in the tail: the weight is exponential across the bin
        let w = b - a;
        return w * w / 12.0;
    }
    let mean = (pdf(za) - pdf(zb)) / z;
    let second = 1.0 + (za * pdf(za) - zb * pdf(zb)) / z;
    sigma * sigma * (second - mean * mean)
}
