// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Atoms driven by classical fields only, with the cavity switched off.
//!
//! Each atom evolves independently under
//! `Δ/2 σ₃ + h(σ₊ e^{i(Ωt+φ)} + σ₋ e^{−i(Ωt+φ)})`. Moving into the frame
//! `U(t) = diag(e^{i(Ωt+φ)/2}, e^{−i(Ωt+φ)/2})` leaves the constant generator
//! `[[θ/2, h], [h, −θ/2]]` whose exponential is the Rabi block. With the drive
//! written as `σ₊ e^{+i(Ωt+φ)}` the frame derivative adds to the level splitting,
//! so `θ = Δ + Ω`; resonance therefore sits at `Ω = −Δ`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, kron_all, ComplexMatrix, C64};
use crate::model::{atomic_drive, atomic_operator, ModelParams, Spin};

/// Single-atom Rabi problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiParams {
    /// Frame detuning `Δ + Ω`.
    pub theta: f64,
    pub h: f64,
    pub t: f64,
    /// Drive frequency `Ω`.
    pub frequency: f64,
    pub phi: f64,
}

impl RabiParams {
    /// `√(θ²/4 + h²)`.
    pub fn effective_frequency(&self) -> f64 {
        (self.theta * self.theta / 4.0 + self.h * self.h).sqrt()
    }
}

/// `exp(−it[[θ/2, h], [h, −θ/2]])` in closed form.
pub fn rabi_block(p: &RabiParams) -> ComplexMatrix {
    let w = p.effective_frequency();
    let (s, co) = (p.t * w).sin_cos();
    // sin(tw)/w → t as w → 0
    let sinc = if w > 0.0 { s / w } else { p.t };
    let x11 = c(co, -p.theta / 2.0 * sinc);
    let x12 = c(0.0, -p.h * sinc);
    let x22 = c(co, p.theta / 2.0 * sinc);
    ComplexMatrix::from_rows(&[[x11, x12], [x12, x22]])
}

/// `diag(e^{i(Ωt+φ)/2}, e^{−i(Ωt+φ)/2})` at time `p.t`.
pub fn dressed_frame_factor(p: &RabiParams) -> ComplexMatrix {
    let half = (p.frequency * p.t + p.phi) / 2.0;
    ComplexMatrix::from_diag(&[C64::from_polar(1.0, half), C64::from_polar(1.0, -half)])
}

/// Single-atom propagator `U(t) · exp(−itH̃) · U(0)†`.
pub fn single_atom_propagator(p: &RabiParams) -> ComplexMatrix {
    let start = RabiParams { t: 0.0, ..*p };
    dressed_frame_factor(p).matmul(&rabi_block(p)).matmul(&dressed_frame_factor(&start).dagger())
}

fn atom_params(params: &ModelParams, j: usize, t: f64) -> RabiParams {
    let d = params.drive(j - 1);
    RabiParams { theta: params.delta + d.frequency, h: d.h, t, frequency: d.frequency, phi: d.phi }
}

/// Propagator of the cavity-free problem on all atoms, `dim = 2ⁿ`.
pub fn full_solution(params: &ModelParams, t: f64) -> Result<ComplexMatrix> {
    params.validate_allowing_zero_coupling()?;
    let blocks: Vec<ComplexMatrix> =
        (1..=params.n_atoms).map(|j| single_atom_propagator(&atom_params(params, j, t))).collect();
    Ok(kron_all(blocks.iter()))
}

/// Cavity-free problem equivalent to the rotated-frame dynamics at `g = 0`.
///
/// With the cavity decoupled, the rotated-frame generator is the bare drive
/// with tones at `Ω_j + ω`, i.e. this module's problem with `Δ = 0` and shifted
/// frequencies.
pub fn rotated_frame_counterpart(params: &ModelParams) -> ModelParams {
    let mut p = params.clone();
    p.delta = 0.0;
    p.g = 0.0;
    for d in &mut p.drives {
        d.frequency += params.omega;
    }
    p
}

/// Cavity-free Hamiltonian `Σ_j {Δ/2 σ₃ⱼ + drive_j(t)}`.
pub fn classical_hamiltonian(params: &ModelParams, t: f64) -> ComplexMatrix {
    let n = params.n_atoms;
    let mut h = atomic_drive(params, t);
    for j in 1..=n {
        h.axpy(c(params.delta / 2.0, 0.0), &atomic_operator(n, j, Spin::Z));
    }
    h
}

/// Parameter search for one-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Drive frequency Ω held fixed during the search.
    pub frequency: f64,
    /// Stop once the simplex spread in infidelity falls below this.
    pub simplex_tol: f64,
    pub max_iterations: usize,
    pub target_fidelity: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { frequency: 1.0, simplex_tol: 1e-10, max_iterations: 4000, target_fidelity: 1.0 - 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub params: RabiParams,
    pub fidelity: f64,
    pub unitary: ComplexMatrix,
    pub seeds: usize,
    pub evaluations: usize,
}

fn two_by_two_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let tr: C64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].conj() * b[(i, j)]).sum();
    tr.norm() / 2.0
}

fn decode(x: &[f64; 4], frequency: f64) -> RabiParams {
    RabiParams { theta: x[0], h: x[1], t: x[2], frequency, phi: x[3] }
}

struct Infidelity<'a> {
    target: &'a ComplexMatrix,
    frequency: f64,
}

impl CostFunction for Infidelity<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        let p = decode(&[x[0], x[1], x[2], x[3]], self.frequency);
        Ok(1.0 - two_by_two_fidelity(self.target, &single_atom_propagator(&p)))
    }
}

/// Nelder–Mead refinement from one seed; returns `(best, infidelity, evaluations)`.
fn refine(obj: Infidelity<'_>, start: [f64; 4], cfg: &SearchConfig) -> Result<([f64; 4], f64, usize)> {
    const STEP: [f64; 4] = [0.2, 0.1, 0.5, 0.4];
    let mut simplex = vec![start.to_vec()];
    for k in 0..4 {
        let mut x = start.to_vec();
        x[k] += STEP[k];
        simplex.push(x);
    }
    let failed = |e: argmin::core::Error| Error::InvalidParams(format!("simplex search failed: {e}"));
    let solver = NelderMead::new(simplex).with_sd_tolerance(cfg.simplex_tol).map_err(failed)?;
    let res = Executor::new(obj, solver)
        .configure(|s| s.max_iters(cfg.max_iterations as u64))
        .run()
        .map_err(failed)?;
    let state = res.state();
    let best = state.get_best_param().expect("Nelder-Mead always records a best vertex");
    let evals = state.get_func_counts().values().sum::<u64>() as usize;
    Ok(([best[0], best[1], best[2], best[3]], state.get_best_cost(), evals))
}

/// Finds `(θ, h, t, φ)` whose single-atom propagator matches `target` up to phase.
///
/// A fixed grid of starting points is refined by a Nelder–Mead simplex in parallel; the
/// best result is chosen by fidelity with ties going to the earliest seed, so
/// the outcome does not depend on scheduling.
pub fn synthesize(target: &ComplexMatrix, cfg: &SearchConfig) -> Result<SynthesisResult> {
    if target.rows() != 2 || target.cols() != 2 {
        return Err(Error::Dimension("one-qubit synthesis needs a 2×2 target".into()));
    }
    if target.unitarity_defect() > 1e-12 {
        return Err(Error::NotUnitary { defect: target.unitarity_defect() });
    }
    let mut seeds = Vec::new();
    for &theta in &[-1.0, -0.25, 0.0, 0.25, 1.0] {
        for &h in &[0.1, 0.3, 0.7] {
            for &t in &[1.5, 3.0, 6.0] {
                for &phi in &[0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
                    seeds.push([theta, h, t, phi]);
                }
            }
        }
    }
    let runs: Vec<([f64; 4], f64, usize)> = seeds
        .par_iter()
        .map(|s| refine(Infidelity { target, frequency: cfg.frequency }, *s, cfg))
        .collect::<Result<_>>()?;
    let evaluations = runs.iter().map(|r| r.2).sum();
    let (best, _, _) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.1.total_cmp(&b.1).then(i.cmp(j)))
        .map(|(_, r)| *r)
        .expect("seed grid is non-empty");
    let params = decode(&best, cfg.frequency);
    let unitary = single_atom_propagator(&params);
    let fidelity = two_by_two_fidelity(target, &unitary);
    Ok(SynthesisResult { params, fidelity, unitary, seeds: seeds.len(), evaluations })
}

/// Phase gate `diag(1, e^{iλ})`.
pub fn phase_gate(lambda: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[c(1.0, 0.0), C64::from_polar(1.0, lambda)])
}
