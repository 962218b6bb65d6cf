//! Truncated Fock space basics: states, displacement and squeezing, moments,
//! and the twin-beam entanglement.

use num_complex::Complex64;
use twinbeam::fock::{
    coherent_state, displacement_operator, moments, number_state, squeezed_state, thermal_state, twb_entanglement,
    twb_entanglement_numeric, TruncationConfig, TwinBeamParams,
};

fn main() -> twinbeam::Result<()> {
    let trunc = TruncationConfig::with_dim(60)?;

    let vac = number_state(0, &trunc)?;
    let alpha = Complex64::new(1.0, 0.5);
    let d = displacement_operator(alpha, &trunc)?;
    let displaced = vac.conjugate_by(&d)?;
    let coherent = coherent_state(alpha, &trunc)?;
    println!("D(α)|0⟩ vs |α⟩: trace distance {:.2e}", displaced.trace_distance(&coherent)?);

    let sq = squeezed_state(Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), &trunc)?;
    let m = moments(&sq);
    println!("S(0.5)|0⟩: Δx² = {:.6} (e^{{-1}}/4 = {:.6}), Δy² = {:.6}", m.quadrature_variance(0.0), (-1f64).exp() / 4.0, m.quadrature_variance(std::f64::consts::FRAC_PI_2));

    let th = thermal_state(0.7, &trunc)?;
    let m = moments(&th);
    println!("thermal n̄=0.7: mean {:.6}, Fano {:.6} (1+n̄ = 1.7)", m.mean_photons, m.fano());

    for n in [0.5, 1.0, 5.0] {
        let twb = TwinBeamParams::from_photons(n)?;
        let t = TruncationConfig::for_twb(&twb, 1e-14)?;
        println!(
            "twin-beam N={n}: λ={:.4}, dim {}, entropy {:.10} (numeric {:.10})",
            twb.lambda(),
            t.dim,
            twb_entanglement(n),
            twb_entanglement_numeric(&twb, t.dim)
        );
    }
    Ok(())
}
