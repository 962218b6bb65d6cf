//! Measurement POVMs on a single mode: on/off photodetection, ideal, noisy and
//! binned homodyne, and heterodyne-type detection against a reference state.

use crate::error::{Error, Result};
use crate::fock::{add_gaussian_noise, FockOperator, TruncationConfig};
use crate::quadrature::{GaussHermite, GaussLegendre};
use crate::special::{displacement_elements, fock_wavefunctions, weighted_hermite};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Outcome label attached to a POVM element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// On/off result: 0 for no click, 1 for click.
    Discrete(u8),
    /// Homodyne quadrature value.
    Real(f64),
    /// Heterodyne amplitude as `[re, im]`.
    Complex([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmMeta {
    pub eta: f64,
    /// Bin width; zero for unbinned elements.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub operator: FockOperator,
    pub outcome: Outcome,
    pub meta: PovmMeta,
}

impl PovmElement {
    fn new(operator: FockOperator, outcome: Outcome, eta: f64, delta: f64) -> Self {
        Self {
            operator,
            outcome,
            meta: PovmMeta { eta, delta },
        }
    }

    /// Checks `-tol ≤ Π`, plus `Π ≤ 1 + tol` for on/off elements and
    /// `δΠ ≤ 1 + tol` for binned homodyne.
    ///
    /// Unbinned densities over a continuous outcome are only bounded below.
    pub fn check_bounds(&self, tol: f64) -> Result<()> {
        let ev = self.operator.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        let ceiling = match self.outcome {
            Outcome::Discrete(_) => Some(hi),
            Outcome::Real(_) if self.meta.delta > 0.0 => Some(hi * self.meta.delta),
            _ => None,
        };
        if lo < -tol || ceiling.is_some_and(|c| c > 1.0 + tol) {
            return Err(Error::InvalidOperator {
                expected: "POVM element",
                reason: format!("spectrum [{lo:e}, {hi}] outside [0, 1]"),
            });
        }
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("{eta} not in (0, 1]")));
    }
    Ok(())
}

/// Smearing variance `(1-η)/(4η)` of a homodyne detector with efficiency η.
pub fn homodyne_noise_variance(eta: f64) -> f64 {
    (1.0 - eta) / (4.0 * eta)
}

/// Smearing variance `(1-η)/η` of a heterodyne-type detector with efficiency η.
pub fn heterodyne_noise_variance(eta: f64) -> f64 {
    (1.0 - eta) / eta
}

/// On/off pair `Π₀ = Σ (1-η)^k |k⟩⟨k|`, `Π₁ = I - Π₀`.
pub fn onoff_povm(eta: f64, trunc: &TruncationConfig) -> Result<(PovmElement, PovmElement)> {
    check_eta(eta)?;
    let diag: Vec<f64> = (0..trunc.dim).map(|k| (1.0 - eta).powi(k as i32)).collect();
    let off = FockOperator::from_diagonal(&diag);
    let on = FockOperator::from_diagonal(&diag.iter().map(|p| 1.0 - p).collect::<Vec<_>>());
    Ok((
        PovmElement::new(off, Outcome::Discrete(0), eta, 0.0),
        PovmElement::new(on, Outcome::Discrete(1), eta, 0.0),
    ))
}

fn real_operator(m: &DMatrix<f64>) -> FockOperator {
    FockOperator::from_matrix(m.map(|v| Complex64::new(v, 0.0))).expect("square by construction")
}

/// `|x⟩⟨x|` for the quadrature eigenstate of `x = (a+a†)/2`.
pub fn homodyne_projector(x: f64, trunc: &TruncationConfig) -> Result<PovmElement> {
    if !x.is_finite() {
        return Err(Error::param("x", "must be finite"));
    }
    let phi = nalgebra::DVector::from_vec(fock_wavefunctions(x, trunc.dim));
    Ok(PovmElement::new(real_operator(&(&phi * phi.transpose())), Outcome::Real(x), 1.0, 0.0))
}

/// Gauss-Hermite machinery for the Gaussian-smeared homodyne density.
///
/// `⟨m|Π_{xη}|n⟩ = ∫dt N(t; x, Δ²) φ_m(t)φ_n(t)` and the integrand is a
/// Gaussian times a polynomial of degree `m + n`, so a rule with `dim + 1`
/// nodes is exact.
struct HomodyneKernel {
    dim: usize,
    gh: GaussHermite,
}

impl HomodyneKernel {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            gh: GaussHermite::new(dim + 1),
        }
    }

    /// Columns `c_k` with `Π_{xη} = Σ_k c_k c_kᵀ`, each scaled by `√scale`.
    fn factor_into(&self, x: f64, eta: f64, scale: f64, cols: &mut Vec<Vec<f64>>) {
        if eta == 1.0 {
            let s = scale.sqrt();
            cols.push(fock_wavefunctions(x, self.dim).into_iter().map(|v| v * s).collect());
            return;
        }
        let var = homodyne_noise_variance(eta);
        let (a, b) = (1.0 / (2.0 * var), 2.0);
        let p = a + b;
        let c = a * x / p;
        let base = 0.5 * (2.0 / PI).ln() - 0.5 * (2.0 * PI * var).ln() - a * b * x * x / p - 0.5 * p.ln() + scale.ln();
        for (&u, &w) in self.gh.nodes().iter().zip(self.gh.weights()) {
            if w == 0.0 {
                continue;
            }
            let t = c + u / p.sqrt();
            cols.push(weighted_hermite(t, 0.5 * (base + w.ln()), self.dim));
        }
    }

    fn assemble(&self, cols: &[Vec<f64>]) -> DMatrix<f64> {
        let phi = DMatrix::from_fn(self.dim, cols.len(), |i, k| cols[k][i]);
        &phi * phi.transpose()
    }

    fn element(&self, x: f64, eta: f64) -> DMatrix<f64> {
        let mut cols = Vec::new();
        self.factor_into(x, eta, 1.0, &mut cols);
        self.assemble(&cols)
    }

    fn binned(&self, x: f64, eta: f64, delta: f64) -> Result<DMatrix<f64>> {
        let mut prev: Option<DMatrix<f64>> = None;
        let mut n = 16;
        while n <= 1024 {
            let gl = GaussLegendre::new(n);
            let mut cols = Vec::new();
            for (t, w) in gl.interval(x - 0.5 * delta, x + 0.5 * delta) {
                self.factor_into(t, eta, w / delta, &mut cols);
            }
            let m = self.assemble(&cols);
            if let Some(p) = &prev {
                let change = (&m - p).amax();
                if change < 1e-10 {
                    return Ok(m);
                }
            }
            prev = Some(m);
            n *= 2;
        }
        Err(Error::Convergence {
            what: "binned homodyne quadrature",
            detail: format!("x={x}, delta={delta}: 1024 Gauss-Legendre nodes insufficient"),
        })
    }
}

/// `Π_{xη} = ∫dt N(t; x, (1-η)/(4η)) |t⟩⟨t|`; reduces to the projector at η = 1.
pub fn homodyne_povm(x: f64, eta: f64, trunc: &TruncationConfig) -> Result<PovmElement> {
    check_eta(eta)?;
    if !x.is_finite() {
        return Err(Error::param("x", "must be finite"));
    }
    let m = HomodyneKernel::new(trunc.dim).element(x, eta);
    Ok(PovmElement::new(real_operator(&m), Outcome::Real(x), eta, 0.0))
}

/// Bin average `(1/δ) ∫_{x-δ/2}^{x+δ/2} Π_{tη} dt`, integrated with Gauss-Legendre
/// node counts doubled until no entry moves by more than 1e-10.
pub fn binned_homodyne_povm(x: f64, eta: f64, delta: f64, trunc: &TruncationConfig) -> Result<PovmElement> {
    check_eta(eta)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", "must be positive"));
    }
    let m = HomodyneKernel::new(trunc.dim).binned(x, eta, delta)?;
    Ok(PovmElement::new(real_operator(&m), Outcome::Real(x), eta, delta))
}

/// Homodyne elements for many outcomes, sharing one quadrature rule.
pub fn homodyne_family(xs: &[f64], eta: f64, delta: f64, trunc: &TruncationConfig) -> Result<Vec<PovmElement>> {
    check_eta(eta)?;
    if !(delta >= 0.0) {
        return Err(Error::param("delta", "must be >= 0"));
    }
    let kernel = HomodyneKernel::new(trunc.dim);
    xs.iter()
        .map(|&x| {
            let m = if delta == 0.0 {
                kernel.element(x, eta)
            } else {
                kernel.binned(x, eta, delta)?
            };
            Ok(PovmElement::new(real_operator(&m), Outcome::Real(x), eta, delta))
        })
        .collect()
}

/// Default homodyne outcome range `±6√(σ² + Δ_η²)` for a twin-beam marginal
/// with `N` photons, `σ² = (1+N)/4`.
pub fn homodyne_range(photons: f64, eta: f64) -> f64 {
    6.0 * ((1.0 + photons) / 4.0 + homodyne_noise_variance(eta)).sqrt()
}

/// Reference state after the detector's Gaussian smearing: the additive noise
/// channel with `(1-η)/η` photons, on enough levels to hold the result.
pub fn smeared_reference(reference: &FockOperator, eta: f64) -> Result<FockOperator> {
    check_eta(eta)?;
    if eta == 1.0 {
        return Ok(reference.clone());
    }
    noisy_reference(reference, heterodyne_noise_variance(eta))
}

pub(crate) fn noisy_reference(reference: &FockOperator, k: f64) -> Result<FockOperator> {
    if k == 0.0 {
        return Ok(reference.clone());
    }
    let d = reference.dim() as f64;
    let target = reference.trace() - 1e-14;
    let mut out_dim = ((1.0 + k) * (d + 40.0)).ceil() as usize;
    for _ in 0..4 {
        let out = add_gaussian_noise(reference, k, out_dim)?;
        if out.trace() >= target {
            return Ok(out);
        }
        out_dim *= 2;
    }
    Err(Error::Convergence {
        what: "noisy reference truncation",
        detail: format!("k={k}: tail not captured at dimension {out_dim}"),
    })
}

/// Heterodyne-type detector: a fixed reference state, smeared and transposed
/// once.
pub struct HeterodyneDetector {
    reference_t: FockOperator,
    dim: usize,
    eta: f64,
}

impl HeterodyneDetector {
    pub fn new(reference: &FockOperator, eta: f64, trunc: &TruncationConfig) -> Result<Self> {
        check_eta(eta)?;
        reference.validate_state(1e-6)?;
        let reference_t = smeared_reference(reference, eta)?.transpose();
        Ok(Self {
            reference_t,
            dim: trunc.dim,
            eta,
        })
    }

    /// Smeared reference `N(S)` transposed in the Fock basis.
    pub fn reference_transposed(&self) -> &FockOperator {
        &self.reference_t
    }

    pub fn element(&self, alpha: Complex64) -> Result<PovmElement> {
        if !alpha.is_finite() {
            return Err(Error::param("alpha", "must be finite"));
        }
        let b = displacement_elements(alpha, self.dim, self.reference_t.dim());
        let m = &b * self.reference_t.matrix() * b.adjoint() * Complex64::new(1.0 / PI, 0.0);
        Ok(PovmElement::new(
            FockOperator::from_matrix(m)?,
            Outcome::Complex([alpha.re, alpha.im]),
            self.eta,
            0.0,
        ))
    }
}

/// `Π_α = (1/π) D(α) Sᵀ D†(α)` with `Sᵀ` the Fock-basis transpose; for η < 1 the
/// reference is first smeared with `(1-η)/η` noise photons.
pub fn heterodyne_povm(
    alpha: Complex64,
    reference: &FockOperator,
    eta: f64,
    trunc: &TruncationConfig,
) -> Result<PovmElement> {
    if !alpha.is_finite() {
        return Err(Error::param("alpha", "must be finite"));
    }
    HeterodyneDetector::new(reference, eta, trunc)?.element(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, number_state};
    use approx::assert_relative_eq;

    fn trunc(d: usize) -> TruncationConfig {
        TruncationConfig::with_dim(d).unwrap()
    }

    #[test]
    fn onoff_entries() {
        let (off, on) = onoff_povm(0.5, &trunc(6)).unwrap();
        assert_relative_eq!(off.operator.get(2, 2).re, 0.25);
        let sum = off.operator.sum(&on.operator).unwrap();
        assert_eq!(sum, FockOperator::identity(6));
        let (off, _) = onoff_povm(1.0, &trunc(6)).unwrap();
        assert_eq!(off.operator, FockOperator::from_diagonal(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert!(onoff_povm(0.0, &trunc(6)).is_err());
        assert!(onoff_povm(1.2, &trunc(6)).is_err());
    }

    #[test]
    fn projector_at_origin() {
        let p = homodyne_projector(0.0, &trunc(4)).unwrap();
        assert_relative_eq!(p.operator.get(0, 0).re, (2.0 / PI).sqrt(), epsilon = 1e-15);
        assert_eq!(p.operator.get(1, 1).re, 0.0);
    }

    #[test]
    fn wavefunctions_normalized() {
        let gl = GaussLegendre::new(200);
        for n in 0..=10 {
            let norm = gl.integrate(-8.0, 8.0, |x| fock_wavefunctions(x, n + 1)[n].powi(2));
            assert_relative_eq!(norm, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn smeared_reduces_to_projector() {
        let t = trunc(30);
        let a = homodyne_povm(0.7, 1.0, &t).unwrap();
        let b = homodyne_projector(0.7, &t).unwrap();
        assert_eq!(a.operator, b.operator);
    }

    #[test]
    fn smeared_matches_brute_force_convolution() {
        let t = trunc(25);
        let (x, eta) = (0.4, 0.6);
        let var = homodyne_noise_variance(eta);
        let el = homodyne_povm(x, eta, &t).unwrap();
        let gl = GaussLegendre::new(400);
        let brute = |m: usize, n: usize| {
            gl.integrate(x - 12.0, x + 12.0, |s| {
                let phi = fock_wavefunctions(s, 25);
                (-(s - x) * (s - x) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt() * phi[m] * phi[n]
            })
        };
        for (m, n) in [(0, 0), (3, 5), (10, 10), (24, 20)] {
            assert_relative_eq!(el.operator.get(m, n).re, brute(m, n), epsilon = 1e-10);
        }
        assert!(el.check_bounds(1e-10).is_ok());
    }

    #[test]
    fn quadrature_rule_is_exact() {
        let k = HomodyneKernel::new(20);
        let more = HomodyneKernel { dim: 20, gh: GaussHermite::new(60) };
        let diff = (k.element(1.3, 0.5) - more.element(1.3, 0.5)).amax();
        assert!(diff < 1e-12);
    }

    #[test]
    fn smeared_noise_variance() {
        assert_relative_eq!(homodyne_noise_variance(0.5), 0.25);
        assert_relative_eq!(homodyne_noise_variance(0.7), 3.0 / 28.0, epsilon = 1e-15);
        assert_relative_eq!(heterodyne_noise_variance(0.5), 1.0);
    }

    #[test]
    fn homodyne_completeness() {
        let d = 12;
        let gl = GaussLegendre::new(160);
        for eta in [1.0, 0.7] {
            let k = HomodyneKernel::new(d);
            let mut total = DMatrix::<f64>::zeros(d, d);
            for (x, w) in gl.interval(-9.0, 9.0) {
                total += k.element(x, eta) * w;
            }
            assert!((total - DMatrix::identity(d, d)).amax() < 1e-8);
        }
    }

    #[test]
    fn binned_limits_and_completeness() {
        let t = trunc(15);
        let narrow = binned_homodyne_povm(0.3, 0.8, 1e-6, &t).unwrap();
        let point = homodyne_povm(0.3, 0.8, &t).unwrap();
        assert!(narrow.operator.trace_distance(&point.operator).unwrap() < 1e-9);

        let delta = 0.5;
        let xs: Vec<f64> = (-20..=20).map(|i| i as f64 * delta).collect();
        let fam = homodyne_family(&xs, 1.0, delta, &t).unwrap();
        let mut total = FockOperator::zeros(15);
        for e in &fam {
            total = total.sum(&e.operator.scaled(delta)).unwrap();
        }
        assert!(total.difference(&FockOperator::identity(15)).unwrap().hermiticity_defect() < 1e-12);
        assert!((total.matrix() - FockOperator::identity(15).matrix()).camax() < 1e-8);
        assert!(fam[20].check_bounds(1e-10).is_ok());
    }

    #[test]
    fn heterodyne_vacuum_reference() {
        let t = trunc(10);
        let vac = number_state(0, &t).unwrap();
        let p = heterodyne_povm(Complex64::new(0.0, 0.0), &vac, 1.0, &t).unwrap();
        assert!((p.operator.matrix() - vac.matrix() / Complex64::new(PI, 0.0)).camax() < 1e-12);
        assert!(heterodyne_povm(Complex64::new(0.0, 0.0), &FockOperator::identity(10), 1.0, &t).is_err());
    }

    #[test]
    fn heterodyne_coherent_reference_is_coherent_projector() {
        // Sᵀ for |z⟩⟨z| is |z̄⟩⟨z̄|, so Π_α = |α + z̄⟩⟨α + z̄|/π
        let t = trunc(40);
        let z = Complex64::new(0.5, 0.4);
        let alpha = Complex64::new(-0.3, 0.8);
        let s = coherent_state(z, &t).unwrap();
        let p = heterodyne_povm(alpha, &s, 1.0, &t).unwrap();
        let expected = coherent_state(alpha + z.conj(), &t).unwrap().scaled(1.0 / PI);
        assert!(p.operator.trace_distance(&expected).unwrap() < 1e-10);
    }

    #[test]
    fn heterodyne_completeness() {
        let d = 8;
        let t = trunc(d);
        let s = coherent_state(Complex64::new(0.3, -0.2), &trunc(30)).unwrap();
        let gh = GaussHermite::new(40);
        for eta in [1.0, 0.6] {
            // ∫d²α Π_α = ∫ e^{-u²-v²} (e^{u²+v²} Π) with α = scale·(u + iv)
            let scale = (1.0 + heterodyne_noise_variance(eta)).sqrt();
            let det = HeterodyneDetector::new(&s, eta, &t).unwrap();
            let mut total = DMatrix::<Complex64>::zeros(d, d);
            for (&u, &wu) in gh.nodes().iter().zip(gh.weights()) {
                for (&v, &wv) in gh.nodes().iter().zip(gh.weights()) {
                    let alpha = Complex64::new(scale * u, scale * v);
                    let w = wu * wv * (u * u + v * v).exp() * scale * scale;
                    let el = det.element(alpha).unwrap();
                    total += el.operator.matrix() * Complex64::new(w, 0.0);
                }
            }
            let err = (total - DMatrix::<Complex64>::identity(d, d)).camax();
            assert!(err < 1e-6, "eta={eta}: {err}");
        }
    }

    #[test]
    fn json_roundtrip() {
        let (off, _) = onoff_povm(0.9, &trunc(3)).unwrap();
        let s = serde_json::to_string(&off).unwrap();
        assert!(s.contains("\"discrete\":0"));
        let back: PovmElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, off);
    }
}
