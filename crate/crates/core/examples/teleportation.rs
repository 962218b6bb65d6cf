//! Teleportation as heterodyne conditioning with displacement feedback, and
//! the Gaussian channel it is equivalent to.

use num_complex::Complex64;
use twinbeam::fock::{coherent_state, fidelity, number_state, TruncationConfig};
use twinbeam::teleport::{
    coherent_fidelity, effective_k, min_photons_for_nonlocality, nonlocality_bound, teleport_state,
    teleport_via_conditioning, ChannelParams,
};

fn main() -> twinbeam::Result<()> {
    let out = TruncationConfig::with_dim(40)?;
    let z = Complex64::new(1.0, 0.0);
    let input = coherent_state(z, &TruncationConfig::with_dim(25)?)?;
    let target = coherent_state(z, &out)?;

    for (n, gt, m, eta) in [(0.0, 0.0, 0.0, 1.0), (1.0, 0.0, 0.0, 1.0), (1.0, 0.1, 0.5, 0.9), (5.0, 0.05, 0.0, 0.95)] {
        let p = ChannelParams::new(n, gt, m, eta)?;
        let k = effective_k(&p);
        let via = teleport_via_conditioning(&input, &p, &out)?;
        let channel = teleport_state(&input, k, &out)?;
        println!(
            "N={n} Γt={gt} M={m} η={eta}: K={k:.6} F={:.6} numeric F={:.6} pipeline-channel distance {:.1e} nonlocal: {}",
            coherent_fidelity(&p),
            fidelity(&via, &target)?,
            via.trace_distance(&channel)?,
            nonlocality_bound(&p).satisfied
        );
    }

    let one = number_state(1, &TruncationConfig::with_dim(4)?)?;
    let sigma = teleport_state(&one, 0.5, &out)?;
    println!("|1⟩ through K=0.5: mean photons {:.8}", twinbeam::fock::moments(&sigma).mean_photons);

    for (gt, m, eta) in [(0.0, 0.0, 0.9), (0.05, 0.1, 0.95), (0.3, 0.0, 1.0)] {
        match min_photons_for_nonlocality(gt, m, eta) {
            Some(n) => println!("Γt={gt} M={m} η={eta}: nonlocal for N > {n:.4}"),
            None => println!("Γt={gt} M={m} η={eta}: no twin-beam beats the noise"),
        }
    }
    Ok(())
}
