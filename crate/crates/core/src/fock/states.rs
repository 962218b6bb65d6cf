//! Standard single-mode states as truncated density matrices.

use super::unitary::{displacement_padding, squeeze_padding, Displacer, Squeezer};
use super::{FockOperator, TruncationConfig, ZERO};
use crate::error::{Error, Result};
use crate::special::ln_factorial;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn check_tail(tail: f64, trunc: &TruncationConfig) -> Result<()> {
    if tail > trunc.tail_tolerance {
        return Err(Error::Truncation {
            tail,
            tolerance: trunc.tail_tolerance,
            dim: trunc.dim,
        });
    }
    Ok(())
}

pub fn number_state(n: usize, trunc: &TruncationConfig) -> Result<FockOperator> {
    if n >= trunc.dim {
        return Err(Error::OutOfRange { index: n, dim: trunc.dim });
    }
    let mut diag = vec![0.0; trunc.dim];
    diag[n] = 1.0;
    Ok(FockOperator::from_diagonal(&diag))
}

/// `|α⟩` from its Fock coefficients `e^{-|α|²/2} αⁿ/√n!`.
pub fn coherent_state(alpha: Complex64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite"));
    }
    let r2 = alpha.norm_sqr();
    let ket = DVector::from_fn(trunc.dim, |n, _| {
        if r2 == 0.0 {
            return if n == 0 { Complex64::new(1.0, 0.0) } else { ZERO };
        }
        let ln = -0.5 * r2 + n as f64 * alpha.norm().ln() - 0.5 * ln_factorial(n);
        Complex64::from_polar(ln.exp(), n as f64 * alpha.arg())
    });
    check_tail(1.0 - ket.norm_squared(), trunc)?;
    Ok(FockOperator::from_ket(&ket))
}

/// Thermal state with mean photon number `n_th`.
pub fn thermal_state(n_th: f64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::param("n_th", "must be finite and >= 0"));
    }
    let q = n_th / (1.0 + n_th);
    let diag: Vec<f64> = (0..trunc.dim).map(|n| q.powi(n as i32) / (1.0 + n_th)).collect();
    check_tail(q.powi(trunc.dim as i32), trunc)?;
    Ok(FockOperator::from_diagonal(&diag))
}

/// `D(α)S(ζ)|0⟩`.
pub fn squeezed_state(alpha: Complex64, zeta: Complex64, trunc: &TruncationConfig) -> Result<FockOperator> {
    squeezed_thermal_state(alpha, zeta, 0.0, trunc)
}

/// `D(α)S(ζ) ν(n_th) S†(ζ)D†(α)`, built in a padded space and cropped.
pub fn squeezed_thermal_state(
    alpha: Complex64,
    zeta: Complex64,
    n_th: f64,
    trunc: &TruncationConfig,
) -> Result<FockOperator> {
    if !alpha.is_finite() || !zeta.is_finite() {
        return Err(Error::param("alpha/zeta", "must be finite"));
    }
    if !(n_th >= 0.0) || !n_th.is_finite() {
        return Err(Error::param("n_th", "must be finite and >= 0"));
    }
    let d = trunc.dim;
    // thermal support kept to double precision
    let q = n_th / (1.0 + n_th);
    let d_th = if q == 0.0 { 1 } else { ((-37.0 / q.ln()).ceil() as usize).max(1) };
    let weights: Vec<f64> = (0..d_th).map(|n| q.powi(n as i32) / (1.0 + n_th)).collect();

    let r = zeta.norm();
    let sq_rows = squeeze_padding(d, d_th, r) - 30;
    let sq = Squeezer::new(squeeze_padding(d, d_th, r));
    let cols = sq.block(zeta, sq_rows, d_th);
    // rows carrying non-negligible amplitude after squeezing
    let support = (0..sq_rows)
        .rev()
        .find(|&i| cols.row(i).iter().any(|z| z.norm() > 1e-17))
        .map_or(1, |i| i + 1);
    let cols = cols.rows(0, support).into_owned();

    let vectors = if alpha.norm() == 0.0 {
        let mut v = DMatrix::zeros(d, d_th);
        let k = d.min(support);
        v.view_mut((0, 0), (k, d_th)).copy_from(&cols.rows(0, k));
        v
    } else {
        let disp = Displacer::new(displacement_padding(d.max(support), alpha.norm()));
        disp.block(alpha, d, support) * cols
    };
    let mut rho = DMatrix::zeros(d, d);
    for (k, w) in weights.iter().enumerate() {
        let c = vectors.column(k);
        rho += c * c.adjoint() * Complex64::new(*w, 0.0);
    }
    let rho = FockOperator::from_matrix_unchecked(rho);
    check_tail(1.0 - rho.trace(), trunc)?;
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::moments;
    use approx::assert_relative_eq;

    #[test]
    fn coherent_matches_displaced_vacuum() {
        let trunc = TruncationConfig::with_dim(40).unwrap();
        let alpha = Complex64::new(1.2, -0.7);
        let a = coherent_state(alpha, &trunc).unwrap();
        let b = squeezed_state(alpha, ZERO, &trunc).unwrap();
        assert!(a.trace_distance(&b).unwrap() < 1e-10);
    }

    #[test]
    fn tail_is_reported() {
        let trunc = TruncationConfig::with_dim(5).unwrap();
        assert!(matches!(
            coherent_state(Complex64::new(3.0, 0.0), &trunc),
            Err(Error::Truncation { .. })
        ));
        assert!(thermal_state(2.0, &trunc).is_err());
        assert!(number_state(5, &trunc).is_err());
    }

    #[test]
    fn squeezed_thermal_moments() {
        // ⟨n⟩ = (2n_th+1) cosh(2r)/2 - 1/2 + |α|², x-variance (2n_th+1)e^{-2r}/4 for real ζ
        let trunc = TruncationConfig::with_dim(120).unwrap();
        let (r, n_th) = (0.4, 0.3);
        let alpha = Complex64::new(0.5, 1.0);
        let rho = squeezed_thermal_state(alpha, Complex64::new(r, 0.0), n_th, &trunc).unwrap();
        let m = moments(&rho);
        let expected_n = (2.0 * n_th + 1.0) * (2.0 * r).cosh() / 2.0 - 0.5 + alpha.norm_sqr();
        assert_relative_eq!(m.mean_photons, expected_n, epsilon = 1e-9);
        assert_relative_eq!(m.quadrature_variance(0.0), (2.0 * n_th + 1.0) * (-2.0 * r).exp() / 4.0, epsilon = 1e-9);
        assert_relative_eq!(m.mean_a.re, 0.5, epsilon = 1e-9);
    }
}
