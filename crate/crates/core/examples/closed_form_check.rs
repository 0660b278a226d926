// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Compares the closed-form two-atom exchange propagator with a generic matrix
//! exponential, then shows what a flipped sign in one block looks like.
//!
//! Usage: `cargo run --release --example closed_form_check -- [fock_cutoff]`

use cavity_cnot::closed_form::{compare_with_expm, ExpInteraction};
use cavity_cnot::model::HilbertLayout;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cutoff = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(16);
    let layout = HilbertLayout::new(2, cutoff)?;
    let g = 1.0;

    println!("fock cutoff {cutoff}, compared on photon numbers <= {}", cutoff - 2);
    for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let cmp = compare_with_expm(&ExpInteraction::new(t, g, &layout)?, g)?;
        println!("  t = {t:>4}: max error {:.3e}", cmp.max_err);
    }

    let corrupted = ExpInteraction::new(1.0, g, &layout)?.with_block_negated(3, 0);
    let cmp = compare_with_expm(&corrupted, g)?;
    let w = cmp.worst;
    println!(
        "block (3,0) negated: max error {:.3e} at atomic ({}, {}), photons ({}, {})",
        cmp.max_err, w.row_atomic, w.col_atomic, w.row_photons, w.col_photons
    );
    Ok(())
}
