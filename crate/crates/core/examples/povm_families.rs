//! Detector POVMs in the Fock basis and their completeness.

use num_complex::Complex64;
use twinbeam::fock::{coherent_state, FockOperator, TruncationConfig};
use twinbeam::povm::{binned_homodyne_povm, homodyne_povm, homodyne_range, onoff_povm, HeterodyneDetector};
use twinbeam::quadrature::{GaussHermite, GaussLegendre};

fn deviation_from_identity(sum: &FockOperator, block: usize) -> f64 {
    let id = FockOperator::identity(sum.dim());
    (sum.matrix() - id.matrix()).view((0, 0), (block, block)).camax()
}

fn main() -> twinbeam::Result<()> {
    let trunc = TruncationConfig::with_dim(30)?;

    let (off, on) = onoff_povm(0.7, &trunc)?;
    println!("on/off: Π₀ + Π₁ = I deviation {:.1e}", deviation_from_identity(&off.operator.sum(&on.operator)?, 30));

    let eta = 0.8;
    let half = homodyne_range(10.0, eta);
    let gl = GaussLegendre::new(200);
    let mut sum = FockOperator::zeros(30);
    for (x, w) in gl.interval(-half, half) {
        sum = sum.sum(&homodyne_povm(x, eta, &trunc)?.operator.scaled(w))?;
    }
    println!("homodyne η={eta}: ∫Π_x dx deviation on 20 levels {:.1e}", deviation_from_identity(&sum, 20));

    let el = binned_homodyne_povm(0.3, eta, 0.25, &trunc)?;
    el.check_bounds(1e-10)?;
    println!("binned homodyne δ=0.25: trace of bin element {:.6}", el.operator.trace());

    let reference = coherent_state(Complex64::new(0.3, -0.2), &TruncationConfig::with_dim(20)?)?;
    let det_eta: f64 = 0.9;
    let scale = (1.0 + (1.0 - det_eta) / det_eta).sqrt();
    let gh = GaussHermite::new(60);
    let nodes: Vec<(f64, f64)> = gh.nodes().iter().zip(gh.weights()).map(|(&t, &w)| (t, w)).collect();
    let det = HeterodyneDetector::new(&reference, det_eta, &trunc)?;
    let mut sum = FockOperator::zeros(30);
    for &(u, wu) in &nodes {
        for &(v, wv) in &nodes {
            let alpha = Complex64::new(scale * u, scale * v) + Complex64::new(0.3, 0.2);
            let w = wu * wv * (u * u + v * v).exp() * scale * scale;
            sum = sum.sum(&det.element(alpha)?.operator.scaled(w))?;
        }
    }
    println!("heterodyne η={det_eta}: ∫Π_α d²α deviation on 10 levels {:.1e}", deviation_from_identity(&sum, 10));
    Ok(())
}
