// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Adaptive integration of `i dU/dt = G(t) U`.
//!
//! The stepper is the Dormand–Prince 5(4) pair with its standard 4th-order
//! continuous extension, which is used to sample the solution on a uniform
//! output grid without constraining the step size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FrameGenerator;
use crate::linalg::{c, ComplexMatrix, C64, I};
use crate::model::HilbertLayout;

/// Hermitian time-dependent generator acting on blocks of column vectors.
pub trait Generator: Sync {
    fn dim(&self) -> usize;

    /// `G(t) · x`.
    fn apply(&self, t: f64, x: &ComplexMatrix) -> ComplexMatrix;
}

impl Generator for FrameGenerator {
    fn dim(&self) -> usize {
        self.layout().dim()
    }

    fn apply(&self, t: f64, x: &ComplexMatrix) -> ComplexMatrix {
        FrameGenerator::apply(self, t, x)
    }
}

/// Generator given by a closure producing a dense matrix.
pub struct DenseGenerator<F> {
    dim: usize,
    matrix: F,
}

impl<F: Fn(f64) -> ComplexMatrix + Sync> DenseGenerator<F> {
    pub fn new(dim: usize, matrix: F) -> Self {
        Self { dim, matrix }
    }
}

impl<F: Fn(f64) -> ComplexMatrix + Sync> Generator for DenseGenerator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, t: f64, x: &ComplexMatrix) -> ComplexMatrix {
        (self.matrix)(t).matmul(x)
    }
}

/// `s ↦ −G(T − s)`: runs an evolution backwards from `T` to `0`.
pub struct Reversed<'a, G: ?Sized> {
    inner: &'a G,
    t_end: f64,
}

impl<'a, G: Generator + ?Sized> Reversed<'a, G> {
    pub fn new(inner: &'a G, t_end: f64) -> Self {
        Self { inner, t_end }
    }
}

impl<G: Generator + ?Sized> Generator for Reversed<'_, G> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, s: f64, x: &ComplexMatrix) -> ComplexMatrix {
        self.inner.apply(self.t_end - s, x).scale_real(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Method {
    /// Embedded Runge–Kutta 5(4), Dormand–Prince coefficients.
    #[default]
    DormandPrince54,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub method: Method,
    /// Number of output intervals on `[0, t_final]`; at least 200.
    pub output_intervals: usize,
    /// Largest tolerated `‖U†U − I‖∞` on the output grid.
    pub drift_bound: f64,
    /// Re-project onto the nearest isometry after every accepted step.
    pub project: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.1,
            method: Method::DormandPrince54,
            output_intervals: 200,
            drift_bound: 1e-7,
            project: false,
        }
    }
}

impl IntegratorConfig {
    /// Defaults with `max_step = 0.1 / g`.
    pub fn for_coupling(g: f64) -> Self {
        Self { max_step: 0.1 / g, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-2) {
                return Err(Error::InvalidParams(format!("{name} must lie in (0, 1e-2], got {tol}")));
            }
        }
        if !(self.max_step > 0.0 && self.max_step.is_finite()) {
            return Err(Error::InvalidParams(format!("max_step must be positive, got {}", self.max_step)));
        }
        if self.output_intervals < 200 {
            return Err(Error::InvalidParams(format!(
                "output grid needs at least 200 intervals, got {}",
                self.output_intervals
            )));
        }
        if !(self.drift_bound > 0.0) {
            return Err(Error::InvalidParams("drift_bound must be positive".into()));
        }
        Ok(())
    }

    pub fn halved(&self) -> Self {
        Self { rel_tol: self.rel_tol / 2.0, abs_tol: self.abs_tol / 2.0, ..self.clone() }
    }
}

/// Which initial basis columns were propagated.
#[derive(Debug, Clone, PartialEq)]
pub enum Columns {
    Full,
    /// Only `|atomic⟩ ⊗ |0⟩`, i.e. the two-qubit ansatz.
    Ansatz,
}

#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub layout: HilbertLayout,
    /// Basis index of each propagated column.
    pub columns: Vec<usize>,
    pub times: Vec<f64>,
    /// `U₀(t)` restricted to `columns` (`dim × columns.len()`).
    pub propagators: Vec<ComplexMatrix>,
    pub unitarity_drift: Vec<f64>,
    /// Population outside the ansatz sector, worst case over ansatz inputs.
    pub leakage: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl PropagationResult {
    pub fn final_propagator(&self) -> &ComplexMatrix {
        self.propagators.last().expect("grid is never empty")
    }

    pub fn max_drift(&self) -> f64 {
        self.unitarity_drift.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }

    fn grid_index(&self, t: f64) -> Result<usize> {
        let t_end = *self.times.last().expect("grid is never empty");
        if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange(format!("t = {t} outside [0, {t_end}]")));
        }
        let tol = 1e-9 * t_end.max(1.0);
        self.times
            .iter()
            .position(|&s| (s - t).abs() <= tol)
            .ok_or_else(|| Error::OutOfRange(format!("t = {t} is not an output time")))
    }
}

/// Ground-sector block of a propagator.
#[derive(Debug, Clone)]
pub struct SectorGate {
    pub matrix: ComplexMatrix,
    /// `‖G†G − I‖∞`; non-zero because of leakage out of the sector.
    pub unitarity_defect: f64,
}

/// Integrates `i dU₀/dt = F(t) U₀` with `U₀(0) = I` on the full space.
pub fn integrate(gen: &FrameGenerator, t_final: f64, cfg: &IntegratorConfig) -> Result<PropagationResult> {
    integrate_frame(gen, t_final, cfg, Columns::Full)
}

/// As [`integrate`] but propagating only the ansatz columns `|atomic⟩ ⊗ |0⟩`.
///
/// Everything recorded for gate extraction (ground-sector block, leakage,
/// isometry drift) depends only on these columns.
pub fn integrate_ansatz(gen: &FrameGenerator, t_final: f64, cfg: &IntegratorConfig) -> Result<PropagationResult> {
    integrate_frame(gen, t_final, cfg, Columns::Ansatz)
}

fn integrate_frame(
    gen: &FrameGenerator,
    t_final: f64,
    cfg: &IntegratorConfig,
    columns: Columns,
) -> Result<PropagationResult> {
    let g = gen.params().g;
    if g > 0.0 && cfg.max_step > 0.1 / g * (1.0 + 1e-12) {
        return Err(Error::InvalidParams(format!("max_step must be <= 0.1/g = {}", 0.1 / g)));
    }
    let layout = *gen.layout();
    let cols = match columns {
        Columns::Full => (0..layout.dim()).collect(),
        Columns::Ansatz => layout.ground_sector(),
    };
    integrate_generator(gen, &layout, &cols, t_final, cfg)
}

/// Integrates any [`Generator`] from the identity restricted to `columns`.
pub fn integrate_generator<G: Generator + ?Sized>(
    gen: &G,
    layout: &HilbertLayout,
    columns: &[usize],
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<PropagationResult> {
    cfg.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!("t_final must be positive, got {t_final}")));
    }
    if gen.dim() != layout.dim() {
        return Err(Error::Dimension(format!("generator dim {} vs layout dim {}", gen.dim(), layout.dim())));
    }
    let dim = layout.dim();
    let mut y0 = ComplexMatrix::zeros(dim, columns.len());
    for (j, &col) in columns.iter().enumerate() {
        y0[(col, j)] = c(1.0, 0.0);
    }
    let n = cfg.output_intervals;
    let grid: Vec<f64> = (0..=n).map(|i| t_final * i as f64 / n as f64).collect();
    let out = dopri5(gen, y0, &grid, cfg)?;

    let ground = layout.ground_sector();
    let ground_cols: Vec<usize> =
        columns.iter().enumerate().filter(|(_, c)| ground.contains(c)).map(|(j, _)| j).collect();
    let mut drift = Vec::with_capacity(grid.len());
    let mut leakage = Vec::with_capacity(grid.len());
    for (t, u) in grid.iter().zip(&out.states) {
        let d = u.unitarity_defect();
        if d > cfg.drift_bound {
            return Err(Error::Accuracy { t: *t, drift: d, bound: cfg.drift_bound });
        }
        drift.push(d);
        let worst = ground_cols
            .iter()
            .map(|&j| {
                let kept: f64 = ground.iter().map(|&r| u[(r, j)].norm_sqr()).sum();
                (1.0 - kept).clamp(0.0, 1.0)
            })
            .fold(0.0, f64::max);
        leakage.push(worst);
    }
    Ok(PropagationResult {
        layout: *layout,
        columns: columns.to_vec(),
        times: grid,
        propagators: out.states,
        unitarity_drift: drift,
        leakage,
        accepted_steps: out.accepted,
        rejected_steps: out.rejected,
    })
}

/// 4×4 block `⟨a ⊗ 0| U₀(t) |b ⊗ 0⟩` at an output time.
pub fn ground_sector_gate(result: &PropagationResult, t: f64) -> Result<SectorGate> {
    let idx = result.grid_index(t)?;
    let ground = result.layout.ground_sector();
    let col_pos: Vec<usize> = ground
        .iter()
        .map(|g| {
            result
                .columns
                .iter()
                .position(|c| c == g)
                .ok_or_else(|| Error::Unsupported("ground-sector columns were not propagated".into()))
        })
        .collect::<Result<_>>()?;
    let u = &result.propagators[idx];
    let matrix = u.select(&ground, &col_pos);
    let unitarity_defect = matrix.unitarity_defect();
    Ok(SectorGate { matrix, unitarity_defect })
}

struct DenseRun {
    states: Vec<ComplexMatrix>,
    accepted: usize,
    rejected: usize,
}

mod tableau {
    pub const C2: f64 = 1.0 / 5.0;
    pub const C3: f64 = 3.0 / 10.0;
    pub const C4: f64 = 4.0 / 5.0;
    pub const C5: f64 = 8.0 / 9.0;

    pub const A21: f64 = 1.0 / 5.0;
    pub const A31: f64 = 3.0 / 40.0;
    pub const A32: f64 = 9.0 / 40.0;
    pub const A41: f64 = 44.0 / 45.0;
    pub const A42: f64 = -56.0 / 15.0;
    pub const A43: f64 = 32.0 / 9.0;
    pub const A51: f64 = 19372.0 / 6561.0;
    pub const A52: f64 = -25360.0 / 2187.0;
    pub const A53: f64 = 64448.0 / 6561.0;
    pub const A54: f64 = -212.0 / 729.0;
    pub const A61: f64 = 9017.0 / 3168.0;
    pub const A62: f64 = -355.0 / 33.0;
    pub const A63: f64 = 46732.0 / 5247.0;
    pub const A64: f64 = 49.0 / 176.0;
    pub const A65: f64 = -5103.0 / 18656.0;
    pub const A71: f64 = 35.0 / 384.0;
    pub const A73: f64 = 500.0 / 1113.0;
    pub const A74: f64 = 125.0 / 192.0;
    pub const A75: f64 = -2187.0 / 6784.0;
    pub const A76: f64 = 11.0 / 84.0;

    pub const E1: f64 = 71.0 / 57600.0;
    pub const E3: f64 = -71.0 / 16695.0;
    pub const E4: f64 = 71.0 / 1920.0;
    pub const E5: f64 = -17253.0 / 339200.0;
    pub const E6: f64 = 22.0 / 525.0;
    pub const E7: f64 = -1.0 / 40.0;

    pub const D1: f64 = -12715105075.0 / 11282082432.0;
    pub const D3: f64 = 87487479700.0 / 32700410799.0;
    pub const D4: f64 = -10690763975.0 / 1880347072.0;
    pub const D5: f64 = 701980252875.0 / 199316789632.0;
    pub const D6: f64 = -1453857185.0 / 822651844.0;
    pub const D7: f64 = 69997945.0 / 29380423.0;
}

fn combine(base: &ComplexMatrix, h: f64, terms: &[(f64, &ComplexMatrix)]) -> ComplexMatrix {
    let mut out = base.clone();
    let dst = out.as_mut_slice();
    for &(w, k) in terms {
        if w == 0.0 {
            continue;
        }
        let s = h * w;
        for (o, v) in dst.iter_mut().zip(k.as_slice()) {
            *o += v * s;
        }
    }
    out
}

fn rhs<G: Generator + ?Sized>(gen: &G, t: f64, y: &ComplexMatrix) -> ComplexMatrix {
    gen.apply(t, y).scale(-I)
}

fn nearest_isometry(u: &ComplexMatrix) -> ComplexMatrix {
    let svd = u.to_nalgebra().svd(true, true);
    let w = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    ComplexMatrix::from_nalgebra(&(w * vt))
}

fn dopri5<G: Generator + ?Sized>(
    gen: &G,
    y0: ComplexMatrix,
    grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<DenseRun> {
    use tableau::*;

    let t_final = *grid.last().expect("non-empty grid");
    let mut states = Vec::with_capacity(grid.len());
    states.push(y0.clone());
    let mut next_out = 1;

    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = rhs(gen, t, &y);
    let mut h = cfg.max_step.min(t_final).min(1e-2);
    let mut accepted = 0;
    let mut rejected = 0;

    while t < t_final {
        let last = t + h >= t_final * (1.0 - 1e-15);
        if last {
            h = t_final - t;
        }
        let y2 = combine(&y, h, &[(A21, &k1)]);
        let k2 = rhs(gen, t + C2 * h, &y2);
        let y3 = combine(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = rhs(gen, t + C3 * h, &y3);
        let y4 = combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = rhs(gen, t + C4 * h, &y4);
        let y5 = combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = rhs(gen, t + C5 * h, &y5);
        let y6 = combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let k6 = rhs(gen, t + h, &y6);
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(gen, t + h, &y_new);

        let err_vec = combine(
            &ComplexMatrix::zeros(y.rows(), y.cols()),
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let mut acc = 0.0;
        for ((e, a), b) in err_vec.as_slice().iter().zip(y.as_slice()).zip(y_new.as_slice()) {
            let sc = cfg.abs_tol + cfg.rel_tol * a.norm().max(b.norm());
            let r = e.norm() / sc;
            acc += r * r;
        }
        let err = (acc / err_vec.as_slice().len() as f64).sqrt();

        if err <= 1.0 {
            accepted += 1;
            let t_new = if last { t_final } else { t + h };
            // Dense output on every grid point inside (t, t_new].
            while next_out < grid.len() && grid[next_out] <= t_new {
                let s = grid[next_out];
                let state = if next_out == grid.len() - 1 && last {
                    y_new.clone()
                } else {
                    interpolate(&y, &y_new, [&k1, &k3, &k4, &k5, &k6, &k7], h, (s - t) / h)
                };
                let state = if cfg.project { nearest_isometry(&state) } else { state };
                states.push(state);
                next_out += 1;
            }
            t = t_new;
            if cfg.project {
                y = nearest_isometry(&y_new);
                k1 = rhs(gen, t, &y);
            } else {
                y = y_new;
                k1 = k7;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(cfg.max_step);
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness { t, step: h });
        }
    }
    debug_assert_eq!(states.len(), grid.len());
    Ok(DenseRun { states, accepted, rejected })
}

fn interpolate(
    y: &ComplexMatrix,
    y_new: &ComplexMatrix,
    k: [&ComplexMatrix; 6],
    h: f64,
    theta: f64,
) -> ComplexMatrix {
    use tableau::*;
    let [k1, k3, k4, k5, k6, k7] = k;
    let th1 = 1.0 - theta;
    let mut out = y.clone();
    let slices = (
        y.as_slice(),
        y_new.as_slice(),
        k1.as_slice(),
        k3.as_slice(),
        k4.as_slice(),
        k5.as_slice(),
        k6.as_slice(),
        k7.as_slice(),
    );
    for (i, o) in out.as_mut_slice().iter_mut().enumerate() {
        let y0: C64 = slices.0[i];
        let ydiff = slices.1[i] - y0;
        let bspl = slices.2[i] * h - ydiff;
        let r4 = ydiff - slices.7[i] * h - bspl;
        let r5 = (slices.2[i] * D1
            + slices.3[i] * D3
            + slices.4[i] * D4
            + slices.5[i] * D5
            + slices.6[i] * D6
            + slices.7[i] * D7)
            * h;
        *o = y0 + (ydiff + (bspl + (r4 + r5 * th1) * theta) * th1) * theta;
    }
    out
}
