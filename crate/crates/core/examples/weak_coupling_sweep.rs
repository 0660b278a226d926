// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Runs the gate at several drive strengths and tabulates fidelity to the
//! rotating-wave prediction against leakage out of the vacuum sector.
//!
//! Usage: `cargo run --release --example weak_coupling_sweep -- [h1,h1,...] [jobs]`

use cavity_cnot::pipeline::{fit_leakage_scaling, sweep, GateRunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let h1: Vec<f64> = match args.next() {
        Some(list) => list.split(',').map(str::parse).collect::<Result<_, _>>()?,
        None => vec![0.04, 0.02, 0.01],
    };
    let jobs = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);

    let results = sweep(&GateRunConfig::default(), &h1, jobs)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "h1", "fidelity", "leak_max", "cz_dist", "steps");
    let mut points = Vec::new();
    for (h, r) in results {
        let r = r?;
        println!("{h:>8} {:>10.6} {:>10.3e} {:>10.3e} {:>10}", r.fidelity, r.leakage_max, r.cz_distance, r.accepted_steps);
        points.push((h, r.leakage_max));
    }
    if let Some(fit) = fit_leakage_scaling(&points) {
        println!("leakage ~ C h1^2 fit: C = {:.3e}, worst ratio {:.2}", fit.c, fit.worst_ratio);
    }
    Ok(())
}
