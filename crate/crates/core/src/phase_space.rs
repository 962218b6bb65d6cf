//! Wigner functions on the phase space `α = x + iy`, measure `d²α = dx dy`.
//!
//! Normalization: `∫W[ρ] = 1`, so `W[I] = 1/π` and `Tr[O₁O₂] = π ∫ W[O₁] W[O₂]`.
//! Every operator, POVM elements included, uses the same map.

use crate::error::{Error, Result};
use crate::fock::{FockOperator, TruncationConfig, TwinBeamParams};
use crate::povm::{heterodyne_noise_variance, homodyne_noise_variance};
use crate::quadrature::GaussHermite;
use crate::special::displacement_elements;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

pub use crate::oracles::s_wigner_origin_onoff;

/// `W[O](α) = (2/π) Tr[O D(2α) (-1)^{a†a}]`, the displaced-parity form.
pub fn wigner(op: &FockOperator, alpha: Complex64) -> f64 {
    let d = op.dim();
    let disp = displacement_elements(2.0 * alpha, d, d);
    let m = op.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for mm in 0..d {
        let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
        for n in 0..d {
            acc += m[(mm, n)] * disp[(n, mm)] * sign;
        }
    }
    2.0 / PI * acc.re
}

/// Gaussian of the twin-beam over `(x₁, y₁; x₂, y₂)` with variances `σ±²`.
pub fn twb_wigner(twb: &TwinBeamParams, x1: f64, y1: f64, x2: f64, y2: f64) -> f64 {
    let (sp, sm) = (twb.sigma_plus_sq(), twb.sigma_minus_sq());
    let e = (x1 + x2).powi(2) / (4.0 * sp)
        + (y1 + y2).powi(2) / (4.0 * sm)
        + (x1 - x2).powi(2) / (4.0 * sm)
        + (y1 - y2).powi(2) / (4.0 * sp);
    (-e).exp() / (4.0 * PI * PI * sp * sm)
}

/// Wigner function of a thermal state with mean photon number `n_th`.
pub fn thermal_wigner(n_th: f64, x: f64, y: f64) -> f64 {
    let g = 2.0 * n_th + 1.0;
    2.0 / (PI * g) * (-2.0 * (x * x + y * y) / g).exp()
}

/// Detector kinds with closed-form POVM Wigner functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PovmKind {
    OnOff { eta: f64, click: bool },
    Homodyne { x: f64, eta: f64 },
    Heterodyne { alpha: [f64; 2], eta: f64, reference: FockOperator },
}

impl PovmKind {
    fn eta(&self) -> f64 {
        match self {
            PovmKind::OnOff { eta, .. } | PovmKind::Homodyne { eta, .. } | PovmKind::Heterodyne { eta, .. } => *eta,
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("{eta} not in (0, 1]")));
    }
    Ok(())
}

/// `W[Π₀] = 2/(π(2-η)) exp(-2η|α|²/(2-η))`.
pub fn no_click_wigner(eta: f64, x: f64, y: f64) -> f64 {
    2.0 / (PI * (2.0 - eta)) * (-2.0 * eta * (x * x + y * y) / (2.0 - eta)).exp()
}

/// Closed-form Wigner function of a POVM element at `(x, y)`.
///
/// On/off: [`no_click_wigner`] and `1/π - W[Π₀]`. Homodyne:
/// `(1/π) N(x; x_out, Δ_η²)`, a delta at η = 1 and so rejected there.
/// Heterodyne: `(1/π) W[S](x - x_α, y_α - y)` with the reference smeared by
/// `(1-η)/η` noise photons, evaluated as a Gaussian-weighted quadrature of
/// `W[S]`.
pub fn povm_wigner(kind: &PovmKind, x: f64, y: f64) -> Result<f64> {
    check_eta(kind.eta())?;
    match kind {
        PovmKind::OnOff { eta, click } => {
            let w0 = no_click_wigner(*eta, x, y);
            Ok(if *click { 1.0 / PI - w0 } else { w0 })
        }
        PovmKind::Homodyne { x: out, eta } => {
            if *eta == 1.0 {
                return Err(Error::param("eta", "ideal homodyne Wigner function is a delta distribution"));
            }
            let v = homodyne_noise_variance(*eta);
            Ok((-(x - out).powi(2) / (2.0 * v)).exp() / (PI * (2.0 * PI * v).sqrt()))
        }
        PovmKind::Heterodyne { alpha, eta, reference } => {
            let (u, v) = (x - alpha[0], alpha[1] - y);
            if *eta == 1.0 {
                return Ok(wigner(reference, Complex64::new(u, v)) / PI);
            }
            // smearing by k noise photons convolves W with a Gaussian of variance k/2 per axis
            let var = 0.5 * heterodyne_noise_variance(*eta);
            let gh = GaussHermite::new(40);
            let mut acc = 0.0;
            for (s, ws) in gh.normal(0.0, var) {
                for (t, wt) in gh.normal(0.0, var) {
                    acc += ws * wt * wigner(reference, Complex64::new(u - s, v - t));
                }
            }
            Ok(acc / PI)
        }
    }
}

/// `P = π ∫ W[ν_b] W[Π]` with `ν_b` the twin-beam marginal (thermal, N/2 photons).
///
/// Computed entirely in phase space: Gaussian quadrature against the closed-form
/// POVM Wigner functions, with the Gaussian detector smearing folded into the
/// thermal weight.
pub fn overlap_probability(twb: &TwinBeamParams, kind: &PovmKind) -> Result<f64> {
    check_eta(kind.eta())?;
    let marg = 0.25 * (1.0 + twb.photons());
    match kind {
        PovmKind::OnOff { eta, click } => {
            // W[ν_b] is Gaussian with variance marg per axis; integrate W[Π₀] against it
            let gh = GaussHermite::new(60);
            let mut p0 = 0.0;
            for (s, ws) in gh.normal(0.0, marg) {
                for (t, wt) in gh.normal(0.0, marg) {
                    p0 += ws * wt * no_click_wigner(*eta, s, t);
                }
            }
            let p0 = PI * p0;
            Ok(if *click { 1.0 - p0 } else { p0 })
        }
        PovmKind::Homodyne { x, eta } => {
            // y integrates out of W[ν_b]; the x-marginal is N(0, marg)
            let v = homodyne_noise_variance(*eta);
            if v == 0.0 {
                return Ok((-x * x / (2.0 * marg)).exp() / (2.0 * PI * marg).sqrt());
            }
            let gh = GaussHermite::new(80);
            Ok(gh
                .normal(*x, v)
                .map(|(t, w)| w * (-t * t / (2.0 * marg)).exp() / (2.0 * PI * marg).sqrt())
                .sum())
        }
        PovmKind::Heterodyne { alpha, eta, reference } => {
            // π ∫ W[ν_b](x,y) (1/π) (W[S] * g)(x - x_α, y_α - y): move g onto ν_b
            let var = marg + 0.5 * heterodyne_noise_variance(*eta);
            let gh = GaussHermite::new(50);
            let mut acc = 0.0;
            for (s, ws) in gh.normal(0.0, var) {
                for (t, wt) in gh.normal(0.0, var) {
                    acc += ws * wt * wigner(reference, Complex64::new(s - alpha[0], alpha[1] - t));
                }
            }
            Ok(acc)
        }
    }
}

/// Rectangular grid with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl PhaseGrid {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::param("nx/ny", "need at least two points per axis"));
        }
        if !(x_range.1 > x_range.0 && y_range.1 > y_range.0) {
            return Err(Error::param("range", "empty interval"));
        }
        Ok(Self { x_range, y_range, nx, ny })
    }

    /// Square grid `[-half, half]²`.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new((-half, half), (-half, half), n, n)
    }

    fn axis(range: (f64, f64), n: usize) -> impl Iterator<Item = (f64, f64)> {
        let h = (range.1 - range.0) / (n - 1) as f64;
        (0..n).map(move |i| {
            let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
            (range.0 + i as f64 * h, w)
        })
    }

    /// Points `(x, y, weight)` in row-major order (y outer, x inner).
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let xs: Vec<_> = Self::axis(self.x_range, self.nx).collect();
        Self::axis(self.y_range, self.ny)
            .flat_map(|(y, wy)| xs.iter().map(move |&(x, wx)| (x, y, wx * wy)))
            .collect()
    }
}

/// Wigner values on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMap {
    pub grid: PhaseGrid,
    /// `(x, y, W)` in grid order.
    pub values: Vec<(f64, f64, f64)>,
}

impl WignerMap {
    pub fn integral(&self) -> f64 {
        self.grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|((_, _, w), (_, _, v))| w * v)
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,W\n");
        for (x, y, w) in &self.values {
            let _ = writeln!(out, "{x},{y},{w:.17e}");
        }
        out
    }
}

/// Wigner function of a state sampled on `grid`, in parallel.
///
/// Fails when the grid integral misses unity by more than 1e-6.
pub fn wigner_map(state: &FockOperator, grid: &PhaseGrid) -> Result<WignerMap> {
    let values: Vec<(f64, f64, f64)> = grid
        .points()
        .par_iter()
        .map(|&(x, y, _)| (x, y, wigner(state, Complex64::new(x, y))))
        .collect();
    let map = WignerMap { grid: *grid, values };
    let integral = map.integral();
    if (integral - state.trace()).abs() > 1e-6 {
        return Err(Error::Convergence {
            what: "Wigner grid normalization",
            detail: format!("grid integral {integral} vs trace {}; widen or refine the grid", state.trace()),
        });
    }
    Ok(map)
}

/// Inverse map `O = 2 ∫ d²α W(α) D(2α) (-1)^{a†a}` by trapezoid quadrature of
/// the sampled Wigner function.
///
/// The reconstructed trace must match the grid integral of `W` to 1e-6;
/// otherwise the grid aliases the kernel and an error is returned.
pub fn operator_from_wigner(map: &WignerMap, trunc: &TruncationConfig) -> Result<FockOperator> {
    let d = trunc.dim;
    let weights = map.grid.points();
    let op = map
        .values
        .par_iter()
        .zip(weights.par_iter())
        .map(|(&(x, y, w), &(_, _, wt))| {
            let disp = displacement_elements(Complex64::new(2.0 * x, 2.0 * y), d, d);
            DMatrix::from_fn(d, d, |m, n| disp[(m, n)] * if n % 2 == 0 { 2.0 * w * wt } else { -2.0 * w * wt })
        })
        .reduce(|| DMatrix::zeros(d, d), |a, b| a + b);
    let op = FockOperator::from_matrix(op)?;
    let integral = map.integral();
    if (op.trace() - integral).abs() > 1e-6 {
        return Err(Error::Convergence {
            what: "Wigner inversion",
            detail: format!("reconstructed trace {} vs grid integral {integral}: aliasing", op.trace()),
        });
    }
    Ok(op)
}
