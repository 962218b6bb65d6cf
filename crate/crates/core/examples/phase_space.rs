//! Wigner functions: a map of the click-conditioned state, the inverse
//! transform, and detection probabilities from phase-space overlaps.

use num_complex::Complex64;
use twinbeam::conditional::{conditional_state, outcome_probability};
use twinbeam::fock::{coherent_state, TruncationConfig, TwinBeamParams};
use twinbeam::phase_space::{operator_from_wigner, overlap_probability, wigner_map, PhaseGrid, PovmKind};
use twinbeam::povm::{heterodyne_povm, homodyne_povm, onoff_povm};

fn main() -> twinbeam::Result<()> {
    let twb = TwinBeamParams::from_photons(1.0)?;
    let trunc = TruncationConfig::for_twb(&twb, 1e-14)?;
    let (_, on) = onoff_povm(0.8, &trunc)?;
    let click = conditional_state(&twb, &on)?.state;

    let grid = PhaseGrid::square(4.5, 121)?;
    let map = wigner_map(&click, &grid)?;
    let min = map.values.iter().map(|v| v.2).fold(f64::INFINITY, f64::min);
    println!("click state: ∫W = {:.10}, min W = {min:.6}", map.integral());
    let back = operator_from_wigner(&map, &trunc)?;
    println!("inverse transform: trace distance to the original {:.2e}", back.trace_distance(&click)?);

    let reference = coherent_state(Complex64::new(0.3, 0.2), &TruncationConfig::with_dim(30)?)?;
    let alpha = Complex64::new(-0.2, 0.5);
    let cases = [
        ("on/off click", PovmKind::OnOff { eta: 0.8, click: true }, on),
        ("homodyne x=0.4", PovmKind::Homodyne { x: 0.4, eta: 0.8 }, homodyne_povm(0.4, 0.8, &trunc)?),
        (
            "heterodyne",
            PovmKind::Heterodyne { alpha: [alpha.re, alpha.im], eta: 0.8, reference: reference.clone() },
            heterodyne_povm(alpha, &reference, 0.8, &trunc)?,
        ),
    ];
    for (label, kind, el) in cases {
        let a = outcome_probability(&twb, &el)?;
        let b = overlap_probability(&twb, &kind)?;
        println!("{label:>15}: Fock {a:.12}  Wigner {b:.12}  |diff| {:.1e}", (a - b).abs());
    }
    Ok(())
}
