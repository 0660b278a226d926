// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Finds classical pulse parameters for one-qubit gates with the cavity
//! decoupled, using the closed-form Rabi propagator.

use cavity_cnot::classical_drive::{phase_gate, synthesize, SearchConfig};
use cavity_cnot::gates::{pauli_x, v_gate, walsh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SearchConfig::default();
    let targets = [
        ("W", walsh().matrix),
        ("X", pauli_x()),
        ("V", v_gate().matrix),
        ("phase(pi/4)", phase_gate(std::f64::consts::FRAC_PI_4)),
    ];
    for (name, target) in targets {
        let r = synthesize(&target, &cfg)?;
        let p = r.params;
        println!(
            "{name:>12}: 1 - F = {:.2e}  theta {:+.6} h {:+.6} t {:.6} phi {:+.6}  ({} evaluations)",
            1.0 - r.fidelity,
            p.theta,
            p.h,
            p.t,
            p.phi,
            r.evaluations
        );
    }
    Ok(())
}
