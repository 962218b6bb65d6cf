//! Conditioning a twin-beam on an on/off click: probability, sub-Poissonian
//! statistics and a negative Wigner function at the origin.

use num_complex::Complex64;
use twinbeam::conditional::conditional_state;
use twinbeam::fock::{moments, TruncationConfig, TwinBeamParams};
use twinbeam::oracles::{click_probability, onoff_fano, onoff_wigner_origin, s_wigner_origin_onoff};
use twinbeam::phase_space::wigner;
use twinbeam::povm::onoff_povm;

fn main() -> twinbeam::Result<()> {
    println!("{:>6} {:>5} {:>12} {:>12} {:>10} {:>10} {:>12} {:>12}", "N", "eta", "P_click", "oracle", "Fano", "oracle", "W(0)", "oracle");
    for n in [0.1, 1.0, 2.0, 5.0] {
        for eta in [1.0, 0.6] {
            let twb = TwinBeamParams::from_photons(n)?;
            let trunc = TruncationConfig::for_twb(&twb, 1e-14)?;
            let (_, on) = onoff_povm(eta, &trunc)?;
            let r = conditional_state(&twb, &on)?;
            println!(
                "{n:>6} {eta:>5} {:>12.8} {:>12.8} {:>10.6} {:>10.6} {:>12.8} {:>12.8}",
                r.probability,
                click_probability(n, eta)?,
                moments(&r.state).fano(),
                onoff_fano(n, eta)?,
                wigner(&r.state, Complex64::new(0.0, 0.0)),
                onoff_wigner_origin(n, eta)?
            );
        }
    }
    println!();
    for s in [-0.2, -0.5, -0.9] {
        println!("s = {s}: W_s(0) at N=1, η=0.8 is {:.6}", s_wigner_origin_onoff(1.0, 0.8, s)?);
    }
    Ok(())
}
