//! Low-order moments, entanglement and fidelity.

use super::FockOperator;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `⟨a⟩`, `⟨a²⟩`, `⟨a†a⟩` and `⟨(a†a)²⟩` of a unit-trace state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean_a: Complex64,
    pub mean_a2: Complex64,
    pub mean_photons: f64,
    pub photon_variance: f64,
}

impl Moments {
    /// `⟨Δn²⟩/⟨n⟩`, taken as 1 for the vacuum.
    pub fn fano(&self) -> f64 {
        if self.mean_photons < 1e-300 {
            1.0
        } else {
            self.photon_variance / self.mean_photons
        }
    }

    /// Variance of `x_θ = (a e^{-iθ} + a† e^{iθ})/2`.
    pub fn quadrature_variance(&self, theta: f64) -> f64 {
        let e1 = Complex64::from_polar(1.0, -theta);
        let e2 = Complex64::from_polar(1.0, -2.0 * theta);
        let mean = (e1 * self.mean_a).re;
        0.25 * (2.0 * (e2 * self.mean_a2).re + 2.0 * self.mean_photons + 1.0) - mean * mean
    }

    pub fn quadrature_mean(&self, theta: f64) -> f64 {
        (Complex64::from_polar(1.0, -theta) * self.mean_a).re
    }
}

/// Moments of `ρ/Tr ρ`; a trace off unity by more than 1e-8 is logged and
/// rescaled.
pub fn moments(state: &FockOperator) -> Moments {
    let tr = state.trace();
    if (tr - 1.0).abs() > 1e-8 {
        log::warn!("moments: rescaling state with trace {tr}");
    }
    let d = state.dim();
    let m = state.matrix();
    let mut a = Complex64::new(0.0, 0.0);
    let mut a2 = Complex64::new(0.0, 0.0);
    let (mut n1, mut n2) = (0.0, 0.0);
    for n in 0..d {
        let p = m[(n, n)].re;
        let nf = n as f64;
        n1 += nf * p;
        n2 += nf * nf * p;
        if n + 1 < d {
            a += m[(n + 1, n)] * (nf + 1.0).sqrt();
        }
        if n + 2 < d {
            a2 += m[(n + 2, n)] * ((nf + 1.0) * (nf + 2.0)).sqrt();
        }
    }
    let s = 1.0 / tr;
    let mean = n1 * s;
    Moments {
        mean_a: a * s,
        mean_a2: a2 * s,
        mean_photons: mean,
        photon_variance: n2 * s - mean * mean,
    }
}

/// Entanglement entropy of a twin-beam with `N` total photons,
/// `log(1 + N/2) + (N/2) log(1 + 2/N)` (natural log).
pub fn twb_entanglement(photons: f64) -> f64 {
    if photons <= 0.0 {
        return 0.0;
    }
    let h = 0.5 * photons;
    (1.0 + h).ln() + h * (1.0 + 1.0 / h).ln()
}

/// Entropy of the truncated thermal marginal, for cross-checking
/// [`twb_entanglement`].
pub fn twb_entanglement_numeric(twb: &super::TwinBeamParams, dim: usize) -> f64 {
    let l2 = twb.lambda_sq();
    (0..dim)
        .map(|p| (1.0 - l2) * l2.powi(p as i32))
        .filter(|&q| q > 0.0)
        .map(|q| -q * q.ln())
        .sum()
}

/// `Tr[ρ P]` for a pure reference `P`; fails when `P` is not pure.
pub fn fidelity(state: &FockOperator, pure: &FockOperator) -> Result<f64> {
    let tr = pure.trace();
    let purity = pure.purity() / (tr * tr);
    if (purity - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidOperator {
            expected: "pure state",
            reason: format!("purity {purity}"),
        });
    }
    Ok(state.overlap(pure)?.re / tr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, number_state, thermal_state, TruncationConfig, TwinBeamParams};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn vacuum_fano_is_one() {
        let t = TruncationConfig::with_dim(4).unwrap();
        let m = moments(&number_state(0, &t).unwrap());
        assert_eq!(m.fano(), 1.0);
        assert_relative_eq!(m.quadrature_variance(0.3), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn thermal_fano() {
        let t = TruncationConfig::with_dim(200).unwrap();
        let m = moments(&thermal_state(1.5, &t).unwrap());
        assert_relative_eq!(m.fano(), 2.5, epsilon = 1e-8);
    }

    #[test]
    fn entanglement_numeric_agrees() {
        for n in [0.5, 2.0, 20.0] {
            let twb = TwinBeamParams::from_photons(n).unwrap();
            let d = TruncationConfig::for_twb(&twb, 1e-14).unwrap().dim;
            assert_relative_eq!(twb_entanglement_numeric(&twb, d), twb_entanglement(n), epsilon = 1e-9);
        }
    }

    #[test]
    fn fidelity_requires_pure_reference() {
        let t = TruncationConfig::with_dim(40).unwrap();
        let th = thermal_state(0.5, &t).unwrap();
        assert!(fidelity(&th, &th).is_err());
        let a = coherent_state(Complex64::new(1.0, 0.0), &t).unwrap();
        let b = coherent_state(Complex64::new(0.0, 1.0), &t).unwrap();
        assert_relative_eq!(fidelity(&a, &b).unwrap(), (-2.0f64).exp(), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn coherent_moments(re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let t = TruncationConfig::with_dim(60).unwrap();
            let alpha = Complex64::new(re, im);
            let m = moments(&coherent_state(alpha, &t).unwrap());
            prop_assert!((m.mean_photons - alpha.norm_sqr()).abs() < 1e-9);
            prop_assert!((m.mean_a - alpha).norm() < 1e-9);
            prop_assert!((m.quadrature_variance(0.4) - 0.25).abs() < 1e-9);
        }
    }
}
