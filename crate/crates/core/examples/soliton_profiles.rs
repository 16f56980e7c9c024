//! Stationary solitons of the three kinds, their linear stability, and a
//! continuation of the twisted branch in omega.
//!
//! cargo run --release --example soliton_profiles -- [omega] [n_sites]

use soliton_entanglement::{continuation, find_soliton, linear_stability, SolitonKind, SystemParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<f64> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let omega = args.first().copied().unwrap_or(10.0);
    let n_sites = args.get(1).map(|&n| n as usize).unwrap_or(25);
    let params = SystemParams { n_sites, omega, ..Default::default() };

    for kind in [SolitonKind::Fundamental, SolitonKind::Twisted, SolitonKind::MultiTwisted(3)] {
        let profile = find_soliton(kind, &params)?;
        let report = linear_stability(&profile);
        let block = kind.dominant_block(n_sites);
        let core: Vec<String> = profile.beta[block.start.saturating_sub(1)..(block.end + 1).min(n_sites)]
            .iter()
            .map(|b| format!("{b:+.4}"))
            .collect();
        println!(
            "{kind:?}: residual {:.1e}, max growth {:.2e} ({}), core [{}]",
            profile.residual,
            report.max_growth_rate,
            if report.is_stable() { "stable" } else { "unstable" },
            core.join(", ")
        );
    }

    let branch = continuation(SolitonKind::Twisted, 6.0, omega, 8, &params).map_err(|e| e.source)?;
    println!("\ntwisted branch");
    println!("{:>8} {:>10} {:>12}", "omega", "power", "growth");
    for profile in &branch {
        let power: f64 = profile.beta.iter().map(|b| b * b).sum();
        println!("{:>8.3} {:>10.4} {:>12.3e}", profile.omega, power, linear_stability(profile).max_growth_rate);
    }
    Ok(())
}
