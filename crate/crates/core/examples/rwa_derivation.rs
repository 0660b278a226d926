// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Builds the ground-sector coefficient matrix as exact trigonometric
//! polynomials, tunes the drive onto resonance and keeps the static terms.
//!
//! Usage: `cargo run --release --example rwa_derivation -- [h1]`

use cavity_cnot::linalg::hermitian_eig;
use cavity_cnot::model::ModelParams;
use cavity_cnot::rwa::{build_reduced_system, gate_params, gate_time, rwa_alpha, rwa_hamiltonian, solve_resonance_for, DEFAULT_RESONANCE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h1 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.01);

    let mut detuned: ModelParams = gate_params(h1);
    detuned.drives[0].frequency = 0.0;
    let omega1 = solve_resonance_for(&detuned, DEFAULT_RESONANCE)?;
    println!("resonant key {DEFAULT_RESONANCE}: Omega1 = {omega1:.15}");

    let sys = build_reduced_system(&gate_params(h1))?;
    println!("frequency terms per entry:");
    for row in &sys.entries {
        let n: Vec<String> = row.iter().map(|p| format!("{:>3}", p.len())).collect();
        println!("  {}", n.join(" "));
    }

    let h = rwa_hamiltonian(&sys, DEFAULT_RESONANCE)?;
    println!("static part (units of h1):");
    for i in 0..4 {
        let row: Vec<String> = (0..4).map(|j| format!("{:+.12}", h[(i, j)].re / h1)).collect();
        println!("  {}", row.join("  "));
    }
    println!("closed form -(sqrt3 - 1)/24 = {:+.12}", -(3f64.sqrt() - 1.0) / 24.0);

    let (ev, _) = hermitian_eig(&h)?;
    println!("spectrum {ev:?}, alpha = {:.6e}", rwa_alpha(h1));
    println!("gate time pi/alpha = {:.6}", gate_time(h1)?);
    Ok(())
}
