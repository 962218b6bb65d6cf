//! Homodyne conditioning: the conditional state is a displaced squeezed
//! (thermal) state; finite bin width limits which outcomes leave it squeezed.

use num_complex::Complex64;
use twinbeam::conditional::conditional_state;
use twinbeam::fock::{fidelity, moments, squeezed_state, TruncationConfig, TwinBeamParams};
use twinbeam::oracles::{binned_squeezing, conditional_squeezing, homodyne_matrix_element, squeezed_probability_exact};
use twinbeam::povm::homodyne_povm;

fn main() -> twinbeam::Result<()> {
    for n in [0.1, 1.0, 5.0] {
        let twb = TwinBeamParams::from_photons(n)?;
        let trunc = TruncationConfig::for_twb(&twb, 1e-14)?;
        for x in [0.0, 0.6] {
            let r = conditional_state(&twb, &homodyne_povm(x, 1.0, &trunc)?)?;
            let rep = conditional_squeezing(x, n, 1.0)?;
            let target = squeezed_state(Complex64::new(rep.alpha_eta, 0.0), Complex64::new(rep.zeta_eta, 0.0), &trunc)?;
            println!("η=1 N={n} x={x}: fidelity with D(α)S(ζ)|0⟩ = {:.12}", fidelity(&r.state, &target)?);
        }
    }

    let (n, eta, x) = (1.0, 0.8, 0.6);
    let twb = TwinBeamParams::from_photons(n)?;
    let trunc = TruncationConfig::for_twb(&twb, 1e-14)?;
    let r = conditional_state(&twb, &homodyne_povm(x, eta, &trunc)?)?;
    let mut worst: f64 = 0.0;
    for i in 0..=6 {
        for j in 0..=6 {
            worst = worst.max((r.state.get(i, j).re - homodyne_matrix_element(i, j, x, n, eta)?).abs());
        }
    }
    let rep = conditional_squeezing(x, n, eta)?;
    println!("η={eta}: max deviation from closed-form elements {worst:.2e}");
    println!("Δx² numeric {:.10}, closed form {:.10}", moments(&r.state).quadrature_variance(0.0), rep.var_x);

    for eta in [0.45, 0.5, 0.55] {
        let rep = conditional_squeezing(0.0, 5.0, eta)?;
        println!("η={eta}: Δx² = {:.6}, squeezed: {}", rep.var_x, rep.is_squeezed);
    }

    let b = binned_squeezing(0.0, 20.0, 0.7, 0.25)?;
    println!(
        "N=20, η=0.7, δ=0.25: x_δ = {:.4}, Q_δ = {:.4} (exact bin integral {:.4})",
        b.x_delta.unwrap_or(f64::NAN),
        b.q_delta,
        squeezed_probability_exact(20.0, 0.7, 0.25)?
    );
    Ok(())
}
