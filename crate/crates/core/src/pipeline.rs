// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! End-to-end gate runs: resonance, integration to `t₀`, extraction, and the
//! swap and Walsh–Hadamard conversions to CNOT.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameGenerator;
use crate::gates::{cnot, cnot_via_conjugation, controlled_z, gate_fidelity, strip_global_phase, swap_p, Gate};
use crate::linalg::ComplexMatrix;
use crate::model::{HilbertLayout, ModelParams};
use crate::propagator::{ground_sector_gate, integrate_ansatz, IntegratorConfig};
use crate::rwa::{gate_params, gate_time, rwa_propagator};

/// Fock cutoff used for two-atom gate simulations.
pub const DEFAULT_FOCK_CUTOFF: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateRunConfig {
    pub h1: f64,
    pub phi1: f64,
    pub fock_cutoff: usize,
    pub integrator: IntegratorConfig,
}

impl Default for GateRunConfig {
    fn default() -> Self {
        Self { h1: 0.01, phi1: 0.0, fock_cutoff: DEFAULT_FOCK_CUTOFF, integrator: IntegratorConfig::default() }
    }
}

impl GateRunConfig {
    pub fn params(&self) -> ModelParams {
        let mut p = gate_params(self.h1);
        p.drives[0].phi = self.phi1;
        p
    }
}

/// Everything measured in one gate run. Matrices are 4×4 on `(++, +−, −+, −−)`.
#[derive(Debug, Clone)]
pub struct GateReport {
    /// Resolved parameters, including the resonant `Ω₁`.
    pub params: ModelParams,
    pub fock_cutoff: usize,
    pub t0: f64,
    /// Simulated ground-sector block at `t₀`.
    pub sector: ComplexMatrix,
    /// Rotating-wave prediction at `t₀`.
    pub predicted: ComplexMatrix,
    /// `|tr(predicted† sector)| / 4`.
    pub fidelity: f64,
    /// Phase-stripped `P · sector`.
    pub controlled_z: ComplexMatrix,
    /// Max entry distance of `controlled_z` from `diag(1, 1, 1, −1)`.
    pub cz_distance: f64,
    /// `(1 ⊗ W) · controlled_z · (1 ⊗ W)`.
    pub cnot: ComplexMatrix,
    pub cnot_fidelity: f64,
    pub leakage_max: f64,
    pub leakage_final: f64,
    pub drift_max: f64,
    pub sector_unitarity_defect: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl GateReport {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }
}

/// Runs the gate pipeline for one drive strength.
pub fn run_gate(cfg: &GateRunConfig) -> Result<GateReport> {
    let params = cfg.params();
    params.validate()?;
    let layout = HilbertLayout::new(2, cfg.fock_cutoff)?;
    let t0 = gate_time(cfg.h1)?;
    let gen = FrameGenerator::new(&params, &layout)?;
    let run = integrate_ansatz(&gen, t0, &cfg.integrator)?;
    let sector = ground_sector_gate(&run, t0)?;
    let predicted = rwa_propagator(t0, cfg.h1, cfg.phi1);
    let fidelity = gate_fidelity(&Gate::measured(predicted.clone(), "U_rwa"), &Gate::measured(sector.matrix.clone(), "U"))?;

    let cz = strip_global_phase(&swap_p().matrix.matmul(&sector.matrix));
    let cz_distance = cz.max_abs_diff(&controlled_z().matrix);
    let cn = cnot_via_conjugation(&Gate::measured(cz.clone(), "P·U"));
    let cnot_fidelity = gate_fidelity(&cn, &cnot())?;

    Ok(GateReport {
        params,
        fock_cutoff: cfg.fock_cutoff,
        t0,
        sector: sector.matrix,
        predicted,
        fidelity,
        controlled_z: cz,
        cz_distance,
        cnot: cn.matrix,
        cnot_fidelity,
        leakage_max: run.max_leakage(),
        leakage_final: *run.leakage.last().expect("grid is never empty"),
        drift_max: run.max_drift(),
        sector_unitarity_defect: sector.unitarity_defect,
        accepted_steps: run.accepted_steps,
        rejected_steps: run.rejected_steps,
    })
}

/// Gate runs over a drive-strength grid, at most `jobs` at a time.
///
/// Results are returned in the order of `h1_values` whatever the completion
/// order; a failure at any point is reported with its `h1`.
pub fn sweep(base: &GateRunConfig, h1_values: &[f64], jobs: usize) -> Result<Vec<(f64, Result<GateReport>)>> {
    if jobs == 0 {
        return Err(Error::InvalidParams("jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParams(format!("thread pool: {e}")))?;
    Ok(pool.install(|| {
        h1_values
            .par_iter()
            .map(|&h1| (h1, run_gate(&GateRunConfig { h1, ..base.clone() })))
            .collect()
    }))
}

/// Least-squares fit of `leakage ≈ C·h₁²` (with `g = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeakageFit {
    pub c: f64,
    /// Largest `leakage / (C h₁²)` over the points; 1 for a perfect quadratic.
    pub worst_ratio: f64,
}

pub fn fit_leakage_scaling(points: &[(f64, f64)]) -> Option<LeakageFit> {
    let den: f64 = points.iter().map(|(h, _)| h.powi(4)).sum();
    if points.is_empty() || den == 0.0 {
        return None;
    }
    let c = points.iter().map(|(h, l)| l * h * h).sum::<f64>() / den;
    let worst_ratio = points.iter().map(|(h, l)| l / (c * h * h)).fold(0.0, f64::max);
    Some(LeakageFit { c, worst_ratio })
}
