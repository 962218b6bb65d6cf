//! Displacement and squeezing as exponentials of truncated generators.
//!
//! Both generators are real symmetric up to a phase rotation, so each
//! exponential is taken once through a symmetric eigendecomposition in a padded
//! space and then cropped to the requested block.

use super::{FockOperator, TruncationConfig};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

/// Padding large enough for `D(α)` to act faithfully on `|0⟩ … |dim-1⟩`.
pub fn displacement_padding(dim: usize, abs_alpha: f64) -> usize {
    let s = abs_alpha + (dim as f64).sqrt();
    (s * s + 10.0 * s + 30.0).ceil() as usize
}

/// Padding large enough for `S(ζ)` to act faithfully on `|0⟩ … |cols-1⟩`
/// and be read out on `rows` rows.
pub fn squeeze_padding(rows: usize, cols: usize, r: f64) -> usize {
    let t = r.abs().tanh();
    let pairs = if t < 1e-12 { 0.0 } else { (37.0 / (-2.0 * t.ln())).ceil() };
    let stretched = (cols as f64 * (2.0 * r.abs()).exp()).ceil() as usize;
    rows.max(stretched) + 2 * pairs as usize + 30
}

fn rotate_block(m: &mut DMatrix<Complex64>, phase: f64) {
    if phase == 0.0 {
        return;
    }
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let k = i as f64 - j as f64;
            m[(i, j)] *= Complex64::from_polar(1.0, phase * k);
        }
    }
}

/// `Σ_k V_ik e^{i t h_k} V_jk` for `i < rows`, `j < cols`.
fn exp_block(eig: &SymmetricEigen<f64, nalgebra::Dyn>, t: f64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let v = &eig.eigenvectors;
    let p = v.ncols();
    let left = DMatrix::from_fn(rows, p, |i, k| Complex64::from_polar(v[(i, k)], t * eig.eigenvalues[k]));
    let right = DMatrix::from_fn(p, cols, |k, j| Complex64::new(v[(j, k)], 0.0));
    left * right
}

/// Reusable spectral data of `a + a†` in a padded space, giving any `D(α)`
/// block with a single matrix product.
pub struct Displacer {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Displacer {
    pub fn new(padded_dim: usize) -> Self {
        let x = DMatrix::from_fn(padded_dim, padded_dim, |i, j| {
            if i + 1 == j {
                (j as f64).sqrt()
            } else if j + 1 == i {
                (i as f64).sqrt()
            } else {
                0.0
            }
        });
        Self {
            eig: SymmetricEigen::new(x),
        }
    }

    /// Sized for blocks up to `dim` and amplitudes up to `max_abs_alpha`.
    pub fn for_dim(dim: usize, max_abs_alpha: f64) -> Self {
        Self::new(displacement_padding(dim, max_abs_alpha))
    }

    pub fn padded_dim(&self) -> usize {
        self.eig.eigenvalues.len()
    }

    /// `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`.
    ///
    /// Uses `D(α) = R(θ) exp(i|α|(a+a†)) R(-θ)` with `R(θ) = e^{iθa†a}` and
    /// `θ = arg α - π/2`.
    pub fn block(&self, alpha: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
        assert!(rows <= self.padded_dim() && cols <= self.padded_dim());
        let (r, arg) = alpha.to_polar();
        let mut m = exp_block(&self.eig, r, rows, cols);
        rotate_block(&mut m, arg - FRAC_PI_2);
        m
    }
}

/// Reusable spectral data of `a² + a†²` in a padded space.
pub struct Squeezer {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl Squeezer {
    pub fn new(padded_dim: usize) -> Self {
        let y = DMatrix::from_fn(padded_dim, padded_dim, |i, j| {
            if i + 2 == j {
                ((i + 1) as f64 * j as f64).sqrt()
            } else if j + 2 == i {
                ((j + 1) as f64 * i as f64).sqrt()
            } else {
                0.0
            }
        });
        Self {
            eig: SymmetricEigen::new(y),
        }
    }

    pub fn padded_dim(&self) -> usize {
        self.eig.eigenvalues.len()
    }

    /// `⟨m|S(ζ)|n⟩` with `S(ζ) = exp[½(ζ̄a² - ζa†²)]`.
    ///
    /// `S(ir) = exp(-(ir/2)(a² + a†²))` and `S(re^{iθ}) = R(φ)S(ir)R(-φ)`
    /// with `φ = (θ - π/2)/2`.
    pub fn block(&self, zeta: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
        assert!(rows <= self.padded_dim() && cols <= self.padded_dim());
        let (r, arg) = zeta.to_polar();
        let mut m = exp_block(&self.eig, -0.5 * r, rows, cols);
        rotate_block(&mut m, 0.5 * (arg - FRAC_PI_2));
        m
    }
}

/// Truncated `D(α)` on the configured dimension.
pub fn displacement_operator(alpha: Complex64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite"));
    }
    let d = trunc.dim;
    let disp = Displacer::for_dim(d, alpha.norm());
    Ok(FockOperator::from_matrix_unchecked(disp.block(alpha, d, d)))
}

/// Truncated `S(ζ)` on the configured dimension.
pub fn squeeze_operator(zeta: Complex64, trunc: &TruncationConfig) -> Result<FockOperator> {
    if !zeta.is_finite() {
        return Err(Error::param("zeta", "must be finite"));
    }
    let d = trunc.dim;
    let sq = Squeezer::new(squeeze_padding(d, d, zeta.norm()));
    Ok(FockOperator::from_matrix_unchecked(sq.block(zeta, d, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{displacement_elements, ln_factorial};

    fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn displacement_matches_laguerre_elements() {
        for alpha in [Complex64::new(0.3, -0.2), Complex64::new(-1.5, 2.0), Complex64::new(0.0, 3.5)] {
            let disp = Displacer::for_dim(40, alpha.norm());
            let a = disp.block(alpha, 40, 40);
            let b = displacement_elements(alpha, 40, 40);
            assert!(max_diff(&a, &b) < 1e-11, "alpha={alpha}: {}", max_diff(&a, &b));
        }
    }

    #[test]
    fn squeezed_vacuum_coefficients() {
        // S(r)|0⟩ = cosh(r)^{-1/2} Σ (-tanh r)^k √((2k)!)/(2^k k!) |2k⟩ for real r
        for r in [0.2, 0.8, 1.5] {
            let sq = Squeezer::new(squeeze_padding(60, 1, r));
            let col = sq.block(Complex64::new(r, 0.0), 60, 1);
            for k in 0..30 {
                let ln = -0.5 * r.cosh().ln() + k as f64 * r.tanh().ln() + 0.5 * ln_factorial(2 * k)
                    - k as f64 * 2f64.ln()
                    - ln_factorial(k);
                let expected = (if k % 2 == 0 { 1.0 } else { -1.0 }) * ln.exp();
                assert!((col[(2 * k, 0)] - expected).norm() < 1e-11, "r={r} k={k}");
                assert!(col[(2 * k + 1, 0)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn squeeze_phase_rotates_quadrature() {
        // S(ζ) with ζ = r e^{iθ}: ⟨0|S|2⟩ picks up the phase e^{iθ} relative to real ζ
        let r = 0.6;
        let sq = Squeezer::new(squeeze_padding(10, 3, r));
        let real = sq.block(Complex64::new(r, 0.0), 10, 1);
        let rot = sq.block(Complex64::from_polar(r, 0.7), 10, 1);
        assert!((rot[(2, 0)] - real[(2, 0)] * Complex64::from_polar(1.0, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn unitarity_on_low_block() {
        let trunc = TruncationConfig::with_dim(30).unwrap();
        let s = squeeze_operator(Complex64::new(0.4, 0.3), &trunc).unwrap();
        let u = Displacer::for_dim(30, 1.0).block(Complex64::new(0.5, 0.5), 80, 10);
        let g = u.adjoint() * &u;
        assert!(max_diff(&g, &DMatrix::identity(10, 10)) < 1e-12);
        let g = s.matrix().adjoint() * s.matrix();
        assert!((g[(0, 0)] - 1.0).norm() < 1e-3);
    }
}
