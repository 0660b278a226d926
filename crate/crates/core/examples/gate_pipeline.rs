// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Integrates the two-atom cavity to the gate time and converts the result to CNOT.
//!
//! Usage: `cargo run --release --example gate_pipeline -- [h1]`

use cavity_cnot::pipeline::{run_gate, GateRunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h1 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.04);
    let cfg = GateRunConfig { h1, ..GateRunConfig::default() };
    let start = std::time::Instant::now();
    let r = run_gate(&cfg)?;

    println!("h1 = {h1}, Omega1 = {:.12}, t0 = {:.6}", r.params.drives[0].frequency, r.t0);
    println!("steps: {} accepted, {} rejected ({:.2?})", r.accepted_steps, r.rejected_steps, start.elapsed());
    println!("fidelity to rotating-wave prediction: {:.6}", r.fidelity);
    println!("fidelity to CNOT after P and W:        {:.6}", r.cnot_fidelity);
    println!("distance of P.U from diag(1,1,1,-1):   {:.3e}", r.cz_distance);
    println!("leakage max {:.3e}, final {:.3e}", r.leakage_max, r.leakage_final);
    println!("isometry drift {:.3e}", r.drift_max);
    println!("\nsimulated ground-sector block |U_ij|:");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:.4}", r.sector[(i, j)].norm())).collect();
        println!("  {}", row.join("  "));
    }
    Ok(())
}
