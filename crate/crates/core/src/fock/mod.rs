//! Truncated single-mode Fock space: operators, state constructors,
//! unitaries, moments and entropies.

mod channel;
mod moments;
mod states;
mod unitary;

pub use channel::add_gaussian_noise;
pub use moments::{fidelity, moments, twb_entanglement, twb_entanglement_numeric, Moments};
pub use states::{
    coherent_state, number_state, squeezed_state, squeezed_thermal_state, thermal_state,
};
pub use unitary::{displacement_operator, squeeze_operator, Displacer, Squeezer};

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Default bound on probability mass discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex square matrix on the span of `|0⟩ … |dim-1⟩`.
///
/// Used for density matrices, POVM elements and (truncated) unitaries alike.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    matrix: DMatrix<Complex64>,
}

impl FockOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), matrix.ncols());
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|`
    pub fn from_ket(ket: &DVector<Complex64>) -> Self {
        Self::from_matrix_unchecked(ket * ket.adjoint())
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| Complex64::new(d, 0.0)));
        Self::from_matrix_unchecked(DMatrix::from_diagonal(&v))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn adjoint(&self) -> Self {
        Self::from_matrix_unchecked(self.matrix.adjoint())
    }

    /// Transpose in the Fock basis, `(Sᵀ)_{nm} = S_{mn}`.
    pub fn transpose(&self) -> Self {
        Self::from_matrix_unchecked(self.matrix.transpose())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_matrix_unchecked(&self.matrix * Complex64::new(factor, 0.0))
    }

    /// Rescaled to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::InvalidOperator {
                expected: "state",
                reason: format!("non-positive trace {tr:e}"),
            });
        }
        Ok(self.scaled(1.0 / tr))
    }

    /// Top-left `dim × dim` block, zero-padded when `dim` exceeds the current size.
    pub fn resized(&self, dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        let k = dim.min(self.dim());
        m.view_mut((0, 0), (k, k)).copy_from(&self.matrix.view((0, 0), (k, k)));
        Self::from_matrix_unchecked(m)
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, unitary: &FockOperator) -> Result<Self> {
        self.check_dim(unitary.dim())?;
        Ok(Self::from_matrix_unchecked(&unitary.matrix * &self.matrix * unitary.matrix.adjoint()))
    }

    pub fn product(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.matrix * &other.matrix))
    }

    pub fn sum(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    pub fn difference(&self, other: &FockOperator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.matrix - &other.matrix))
    }

    /// `Tr[self · other]`
    pub fn overlap(&self, other: &FockOperator) -> Result<Complex64> {
        self.check_dim(other.dim())?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.transpose().iter())
            .map(|(a, b)| a * b)
            .sum())
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    /// Largest entry of `|A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = &self.matrix - self.matrix.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn purity(&self) -> f64 {
        self.overlap(self).map(|z| z.re).unwrap_or(0.0)
    }

    /// `-Tr[ρ ln ρ]` of the unit-trace rescaling.
    pub fn von_neumann_entropy(&self) -> f64 {
        let tr = self.trace();
        self.eigenvalues()
            .into_iter()
            .map(|l| l / tr)
            .filter(|&p| p > 1e-300)
            .map(|p| -p * p.ln())
            .sum()
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &FockOperator) -> Result<f64> {
        Ok(0.5 * self.difference(other)?.eigenvalues().iter().map(|l| l.abs()).sum::<f64>())
    }

    /// Hermitian, positive and trace in `[1 - tail_tolerance, 1]`, each to
    /// the module-wide tolerances.
    pub fn validate_state(&self, tail_tolerance: f64) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::InvalidOperator {
                expected: "state",
                reason: format!("not Hermitian (defect {herm:.2e})"),
            });
        }
        let tr = self.trace();
        if tr < 1.0 - tail_tolerance - 1e-12 || tr > 1.0 + 1e-10 {
            return Err(Error::InvalidOperator {
                expected: "state",
                reason: format!("trace {tr} outside [1-{tail_tolerance:e}, 1]"),
            });
        }
        let min = self.eigenvalues()[0];
        if min < -1e-10 {
            return Err(Error::InvalidOperator {
                expected: "state",
                reason: format!("negative eigenvalue {min:e}"),
            });
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct FockOperatorJson {
    dim: usize,
    rows: Vec<Vec<[f64; 2]>>,
}

impl Serialize for FockOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| [self.matrix[(i, j)].re, self.matrix[(i, j)].im]).collect())
            .collect();
        FockOperatorJson { dim: self.dim(), rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FockOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FockOperatorJson::deserialize(d)?;
        if raw.rows.len() != raw.dim || raw.rows.iter().any(|r| r.len() != raw.dim) {
            return Err(D::Error::custom("rows do not match dim"));
        }
        let m = DMatrix::from_fn(raw.dim, raw.dim, |i, j| {
            let [re, im] = raw.rows[i][j];
            Complex64::new(re, im)
        });
        FockOperator::from_matrix(m).map_err(D::Error::custom)
    }
}

/// Truncation dimension together with the tail-mass budget it must honour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationConfig {
    pub dim: usize,
    pub tail_tolerance: f64,
}

impl TruncationConfig {
    pub fn new(dim: usize, tail_tolerance: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if !(tail_tolerance > 0.0) {
            return Err(Error::param("tail_tolerance", "must be positive"));
        }
        Ok(Self { dim, tail_tolerance })
    }

    pub fn with_dim(dim: usize) -> Result<Self> {
        Self::new(dim, DEFAULT_TAIL_TOLERANCE)
    }

    /// Smallest dimension whose discarded thermal-marginal mass
    /// `Σ_{p≥d} (1-λ²) λ^{2p} = λ^{2d}` is below the tolerance (at least 2).
    pub fn for_twb(twb: &TwinBeamParams, tail_tolerance: f64) -> Result<Self> {
        let l2 = twb.lambda_sq();
        let dim = if l2 <= 0.0 {
            2
        } else {
            let d = (tail_tolerance.ln() / l2.ln()).floor() as usize + 1;
            d.max(2)
        };
        Self::new(dim, tail_tolerance)
    }

    /// Thermal-marginal tail discarded at this dimension.
    pub fn twb_tail(&self, twb: &TwinBeamParams) -> f64 {
        twb.lambda_sq().powi(self.dim as i32)
    }
}

/// Twin-beam `√(1-λ²) Σ λ^p |p⟩|p⟩` described by λ, or equivalently the mean
/// total photon number `N = 2λ²/(1-λ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinBeamParams {
    lambda: f64,
    photons: f64,
}

impl TwinBeamParams {
    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::param("lambda", format!("{lambda} not in [0, 1)")));
        }
        let l2 = lambda * lambda;
        Ok(Self {
            lambda,
            photons: 2.0 * l2 / (1.0 - l2),
        })
    }

    pub fn from_photons(photons: f64) -> Result<Self> {
        if !(photons >= 0.0) || !photons.is_finite() {
            return Err(Error::param("N", format!("{photons} must be finite and >= 0")));
        }
        Ok(Self {
            lambda: (photons / (photons + 2.0)).sqrt(),
            photons,
        })
    }

    /// Parametric amplifier with coupling κ and interaction time τ: λ = tanh|κ|τ.
    pub fn from_coupling(kappa: f64, tau: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::param("tau", "must be >= 0"));
        }
        Self::from_lambda((kappa.abs() * tau).tanh())
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn lambda_sq(&self) -> f64 {
        self.photons / (self.photons + 2.0)
    }

    pub fn photons(&self) -> f64 {
        self.photons
    }

    /// `¼[1 + N + √(N(N+2))]`
    pub fn sigma_plus_sq(&self) -> f64 {
        let n = self.photons;
        0.25 * (1.0 + n + (n * (n + 2.0)).sqrt())
    }

    /// `¼[1 + N - √(N(N+2))]`, written to avoid cancellation at large N.
    pub fn sigma_minus_sq(&self) -> f64 {
        1.0 / (16.0 * self.sigma_plus_sq())
    }

    pub fn entanglement(&self) -> f64 {
        twb_entanglement(self.photons)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn twb_variances_are_conjugate() {
        for n in [0.0, 0.1, 1.0, 20.0, 1e6] {
            let t = TwinBeamParams::from_photons(n).unwrap();
            assert_relative_eq!(t.sigma_plus_sq() * t.sigma_minus_sq(), 1.0 / 16.0, max_relative = 1e-14);
            if n < 100.0 {
                let direct = 0.25 * (1.0 + n - (n * (n + 2.0)).sqrt());
                assert_relative_eq!(t.sigma_minus_sq(), direct, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn coupling_map() {
        let t = TwinBeamParams::from_coupling(0.5, 2.0).unwrap();
        assert_relative_eq!(t.lambda(), 1f64.tanh(), epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TwinBeamParams::from_lambda(1.0).is_err());
        assert!(TwinBeamParams::from_photons(-0.1).is_err());
        assert!(TruncationConfig::new(0, 1e-10).is_err());
    }

    #[test]
    fn truncation_meets_tail_budget() {
        for n in [0.1, 1.0, 5.0, 20.0] {
            let t = TwinBeamParams::from_photons(n).unwrap();
            let tr = TruncationConfig::for_twb(&t, 1e-10).unwrap();
            assert!(tr.twb_tail(&t) < 1e-10);
            let smaller = TruncationConfig::new(tr.dim - 1, 1e-10).unwrap();
            assert!(tr.dim == 2 || smaller.twb_tail(&t) >= 1e-10);
        }
    }

    #[test]
    fn json_shape() {
        let op = FockOperator::from_diagonal(&[0.25, 0.75]);
        let v = serde_json::to_value(&op).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["rows"][1][1][0], 0.75);
        let back: FockOperator = serde_json::from_value(v).unwrap();
        assert_eq!(back, op);
    }

    proptest! {
        #[test]
        fn lambda_photon_roundtrip(lambda in 0.0f64..0.999) {
            let t = TwinBeamParams::from_lambda(lambda).unwrap();
            let u = TwinBeamParams::from_photons(t.photons()).unwrap();
            prop_assert!((u.lambda() - lambda).abs() < 1e-12);
        }
    }
}
