//! Gaussian closure against exact truncated-Fock propagation for two coupled
//! modes with coherent input. Both E_N columns come from the covariance
//! matrix; near the separability threshold E_N magnifies small covariance
//! differences, so the columns part once non-Gaussian corrections build up.
//!
//! cargo run --release --example fock_crosscheck -- [L] [z_max]

use soliton_entanglement::fock::{exact_moments, exact_propagate, suggested_cutoff};
use soliton_entanglement::moments::{propagate_with, PropagateOptions, Snapshot};
use soliton_entanglement::{covariance, log_negativity, Complex64, MomentState, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let scale = args.first().copied().unwrap_or(0.05);
    let z_max = args.get(1).copied().unwrap_or(0.3);
    let alpha = vec![Complex64::new(2.0, 0.0), Complex64::from_polar(2.0, 1.0)];
    let cutoff = suggested_cutoff(&alpha, scale);
    println!("L = {scale}, total-photon cutoff {cutoff}");

    let params = SystemParams { n_sites: 2, quantum_scale: scale, z_max, step: 1e-4, ..Default::default() };
    let options = PropagateOptions { output_stride: 500, store_states: false, ..Default::default() };
    let mut closure = Vec::new();
    let mut keep = |s: &Snapshot<'_>| closure.push(s.state.clone());
    propagate_with(&MomentState::coherent(alpha.clone(), scale), &params, &options, &mut [&mut keep])?;

    println!("{:>6} {:>12} {:>12} {:>12} {:>12}", "z", "E_N closure", "E_N exact", "|d alpha|", "d sigma rel");
    for state in closure.iter().skip(1) {
        let exact = exact_moments(&exact_propagate(&alpha, scale, state.z, cutoff)?, scale).moments;
        let d_alpha = state.alpha.iter().zip(&exact.alpha).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let (s_closure, s_exact) = (covariance(state, 0, 1)?.entries, covariance(&exact, 0, 1)?.entries);
        let d_sigma = (s_closure - s_exact).amax() / s_exact.amax();
        println!(
            "{:>6.3} {:>12.6} {:>12.6} {d_alpha:>12.3e} {d_sigma:>12.3e}",
            state.z,
            log_negativity(state, 0, 1)?,
            log_negativity(&exact, 0, 1)?
        );
    }
    Ok(())
}
