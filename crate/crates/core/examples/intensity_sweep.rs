//! Peak entanglement of the central twisted pair over a grid of quantum
//! scales and absorption rates, run through the configuration harness.
//!
//! cargo run --release --example intensity_sweep

use soliton_entanglement::experiment::{run_sweep, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("soliton_intensity_sweep");
    let overrides = vec![
        "experiment.mode=sweep".to_string(),
        "experiment.sweep_grid.L=[0.005,0.01,0.02]".to_string(),
        "experiment.sweep_grid.gamma=[0.0,0.2]".to_string(),
        "integration.step=0.001".to_string(),
        format!("output.directory={}", serde_json::to_string(&dir)?),
    ];
    let config = RunConfig::from_json_str("{}", &overrides)?;
    let rows = run_sweep(&config)?;
    println!("{:>8} {:>6} {:>10} {:>8} {:>8}", "L", "gamma", "max E_N", "z*", "status");
    for r in &rows {
        let en = r.max_en.map(|e| format!("{e:.5}")).unwrap_or_default();
        let z_star = r.z_star.map(|z| format!("{z:.3}")).unwrap_or_default();
        println!("{:>8} {:>6} {en:>10} {z_star:>8} {:>8}", r.scale, r.gamma, r.status);
    }
    println!("tables written to {}", dir.display());
    Ok(())
}
