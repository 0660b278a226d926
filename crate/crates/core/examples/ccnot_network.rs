// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Assembles the Toffoli gate from controlled square roots of NOT and CNOTs,
//! and the two-qubit CNOT from controlled-z and Walsh–Hadamard gates.

use cavity_cnot::gates::{ccnot, ccnot_network, ccnot_network_with, cnot, cnot_via_conjugation, controlled_z, gate_fidelity, pauli_x};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cn = cnot_via_conjugation(&controlled_z());
    println!("(1 x W) Cz (1 x W) vs CNOT: {:.3e}", cn.matrix.max_abs_diff(&cnot().matrix));

    let net = ccnot_network()?;
    println!("network vs CCNOT: {:.3e}", net.matrix.max_abs_diff(&ccnot().matrix));
    println!("fidelity {:.15}", gate_fidelity(&net, &ccnot())?);

    // With V = X in place of its square root the network is no longer a Toffoli gate.
    let wrong = ccnot_network_with(&pauli_x())?;
    println!("with V = X: fidelity {:.6}", gate_fidelity(&wrong, &ccnot())?);
    println!("{:?}", net.matrix);
    Ok(())
}
