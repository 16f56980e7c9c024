//! Pairwise logarithmic negativity maps for the three soliton families at the
//! propagation distance where the central pair is most entangled.
//!
//! cargo run --release --example entanglement_map -- [omega] [L] [multi_twisted_m]

use soliton_entanglement::moments::{propagate_with, PropagateOptions, Snapshot};
use soliton_entanglement::validity::validity_limit;
use soliton_entanglement::{
    err_metric, find_soliton, initial_state, log_negativity, negativity_map, MomentState, SolitonKind, SystemParams,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let omega = args.first().copied().unwrap_or(10.0);
    let scale = args.get(1).copied().unwrap_or(0.01);
    let m = args.get(2).map(|&m| m as usize).unwrap_or(3);
    let params = SystemParams { omega, quantum_scale: scale, step: 1e-3, ..Default::default() };

    for kind in [SolitonKind::Fundamental, SolitonKind::Twisted, SolitonKind::MultiTwisted(m)] {
        let profile = find_soliton(kind, &params)?;
        let (k, l) = kind.central_pair(params.n_sites);
        let mut snaps: Vec<(MomentState, f64, f64)> = Vec::new();
        let mut record = |s: &Snapshot<'_>| {
            let en = log_negativity(s.state, k, l).unwrap_or(f64::NAN);
            let err = s.cumulants.map(|c| err_metric(s.state, c).unwrap_or(f64::NAN)).unwrap_or(0.0);
            snaps.push((s.state.clone(), en, err));
        };
        let options = PropagateOptions { output_stride: 10, track_cumulants: true, store_states: false, ..Default::default() };
        propagate_with(&initial_state(&profile, scale), &params, &options, &mut [&mut record])?;

        let z: Vec<f64> = snaps.iter().map(|s| s.0.z).collect();
        let err: Vec<f64> = snaps.iter().map(|s| s.2).collect();
        let z_valid = validity_limit(&z, &err, 0.1).unwrap_or(params.z_max);
        let (state, en, _) = snaps
            .iter()
            .filter(|s| s.0.z <= z_valid)
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least the initial snapshot");
        let map = negativity_map(state);
        let max = map.max();
        let block = kind.dominant_block(params.n_sites);
        let lo = block.start.saturating_sub(2);
        let hi = (block.end + 2).min(params.n_sites);

        println!("\n{kind}: pair ({k}, {l}), z* = {:.3}, E_N = {en:.4}, map max = {max:.4}", state.z);
        print!("     ");
        for c in lo..hi {
            print!("{c:>8}");
        }
        println!();
        for r in lo..hi {
            print!("{r:>5}");
            for c in lo..hi {
                print!("{:>8.4}", map[(r, c)]);
            }
            println!();
        }
        let support: Vec<(usize, usize)> = (0..params.n_sites)
            .flat_map(|r| (r + 1..params.n_sites).map(move |c| (r, c)))
            .filter(|&(r, c)| map[(r, c)] >= 0.1 * max)
            .collect();
        println!("support (>= 10% of max): {support:?}");
    }
    Ok(())
}
