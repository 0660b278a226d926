// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Rotated-frame generator for the driven two-atom model.
//!
//! With ω = Δ the undriven propagator factors as
//! `(e^{−itωS₃} ⊗ e^{−itωN}) · E(t)` with `E(t) = exp(−itg(S₊⊗a + S₋⊗a†))`,
//! and the remaining propagator obeys `i dU₀/dt = F(t) U₀` where
//!
//! ```text
//! F(t) = E(t)† · D(t) · E(t),   D(t) = (e^{itωS₃}⊗e^{itωN}) V(t) (e^{−itωS₃}⊗e^{−itωN})
//! ```

use crate::closed_form::{ExpInteraction, FkFunctions};
use crate::error::{Error, Result};
use crate::linalg::{c, kron, ComplexMatrix, C64, I, ZERO};
use crate::model::{HilbertLayout, ModelParams, Operator};

/// Shifted drive factors `h_j e^{i((Ω_j+ω)t+φ_j)}` for the two atoms.
fn shifted_tones(params: &ModelParams, t: f64) -> (C64, C64) {
    let tone = |j: usize| {
        let d = params.drives[j];
        C64::from_polar(d.h, (d.frequency + params.omega) * t + d.phi)
    };
    (tone(0), tone(1))
}

fn check_frame(params: &ModelParams, layout: &HilbertLayout) -> Result<()> {
    params.require_two_atoms()?;
    if layout.n_atoms != 2 {
        return Err(Error::Unsupported(format!("layout has {} atoms, expected 2", layout.n_atoms)));
    }
    if params.drives.len() != 2 {
        return Err(Error::InvalidParams("two drive tones required".into()));
    }
    params.require_cavity_resonance()
}

/// Atomic 4×4 factor of `D(t)`.
pub fn transformed_drive_atomic(params: &ModelParams, t: f64) -> ComplexMatrix {
    let (e1, e2) = shifted_tones(params, t);
    ComplexMatrix::from_rows(&[
        [ZERO, e2, e1, ZERO],
        [e2.conj(), ZERO, ZERO, e1],
        [e1.conj(), ZERO, ZERO, e2],
        [ZERO, e1.conj(), e2.conj(), ZERO],
    ])
}

/// `D(t)`: the drive seen from the frame co-rotating with `ω(S₃ + N)`.
pub fn transformed_drive(params: &ModelParams, layout: &HilbertLayout, t: f64) -> Result<Operator> {
    check_frame(params, layout)?;
    Ok(Operator::new(
        *layout,
        kron(&transformed_drive_atomic(params, t), &ComplexMatrix::identity(layout.fock_dim())),
    ))
}

/// `F(t)` for a fixed parameter set.
#[derive(Debug, Clone)]
pub struct FrameGenerator {
    params: ModelParams,
    layout: HilbertLayout,
}

impl FrameGenerator {
    /// `g = 0` is accepted here; it reduces `F(t)` to `D(t)`.
    pub fn new(params: &ModelParams, layout: &HilbertLayout) -> Result<Self> {
        check_frame(params, layout)?;
        let mut probe = params.clone();
        if probe.g == 0.0 {
            probe.g = 1.0;
        }
        probe.validate()?;
        Ok(Self { params: params.clone(), layout: *layout })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    fn exchange(&self, t: f64) -> ExpInteraction {
        ExpInteraction::new(t, self.params.g, &self.layout).expect("layout checked at construction")
    }

    pub fn evaluate(&self, t: f64) -> Operator {
        let e = self.exchange(t).to_matrix();
        let d = kron(&transformed_drive_atomic(&self.params, t), &ComplexMatrix::identity(self.layout.fock_dim()));
        Operator::new(self.layout, e.dagger().matmul(&d).matmul(&e))
    }

    /// `F(t) · x` without forming `F(t)`.
    pub fn apply(&self, t: f64, x: &ComplexMatrix) -> ComplexMatrix {
        let e = self.exchange(t);
        let ex = e.apply(x);
        let dex = apply_atomic(&transformed_drive_atomic(&self.params, t), &self.layout, &ex);
        e.apply_adjoint(&dex)
    }
}

/// `(A ⊗ 1) · x` for a 4×4 atomic factor `A`.
pub(crate) fn apply_atomic(atomic: &ComplexMatrix, layout: &HilbertLayout, x: &ComplexMatrix) -> ComplexMatrix {
    let fd = layout.fock_dim();
    let n = x.cols();
    let mut out = ComplexMatrix::zeros(x.rows(), n);
    let src = x.as_slice();
    let dst = out.as_mut_slice();
    for i in 0..layout.atomic_dim() {
        for j in 0..layout.atomic_dim() {
            let a = atomic[(i, j)];
            if a == ZERO {
                continue;
            }
            let rows = i * fd * n..(i + 1) * fd * n;
            let cols = j * fd * n..(j + 1) * fd * n;
            for (o, v) in dst[rows].iter_mut().zip(&src[cols]) {
                *o += a * v;
            }
        }
    }
    out
}

/// Term-by-term expansion of `F(t)(a₊₊, a₊₋, a₋₊, a₋₋)ᵀ ⊗ |0⟩`.
///
/// Assembled from the explicit coefficient polynomials in `f(0..2)` and
/// `k(0..2)`, independently of the operator product in [`FrameGenerator`].
/// Only photon components `|0⟩..|3⟩` are populated.
pub fn appendix_action(
    params: &ModelParams,
    layout: &HilbertLayout,
    t: f64,
    amps: [C64; 4],
) -> Result<Vec<C64>> {
    check_frame(params, layout)?;
    let fk = FkFunctions::new(t, params.g, 3);
    let f = |m: isize| fk.f(m);
    let k = |m: isize| fk.k(m);
    let [app, apm, amp, amm] = amps;
    let (e1, e2) = shifted_tones(params, t);
    let (e1c, e2c) = (e1.conj(), e2.conj());
    let r = |x: f64| c(x, 0.0);
    let s2 = 2f64.sqrt();
    let s6 = 6f64.sqrt();

    let c_pp = f(0) + 2.0 / 3.0 * f(0) * f(1) + k(0) * k(1);
    let c_pm = 1.0 + f(0) + 2.0 / 3.0 * f(1) + 2.0 / 3.0 * f(0) * f(1) + k(0) * k(1);
    let leak_1 = k(1) + 0.8 * k(1) * f(2) - 4.0 / 3.0 * f(1) * k(2);

    // comp[a][m]: amplitude on |a⟩ ⊗ |m⟩.
    let mut comp = [[ZERO; 4]; 4];

    // 1-component
    comp[0][1] += e1 * (-I * app * r(leak_1)) + e2 * (-I * app * r(leak_1));
    comp[0][0] += e1 * (apm * r(c_pp) + amp * r(c_pm)) + e2 * (apm * r(c_pm) + amp * r(c_pp));

    // 2-component
    comp[1][2] += e1 * (s2 * app * r(2.0 / 3.0 * f(1) + k(1) * k(2) + 2.0 / 3.0 * f(1) * f(2)))
        + e2 * (s2 * app * r(k(1) * k(2) + 2.0 / 3.0 * f(1) * f(2)));
    comp[1][1] += e1
        * (-I * apm * r(k(0) - f(0) * k(1) + k(0) * f(1))
            - I * amp * r(k(0) - k(1) - f(0) * k(1) + k(0) * f(1)))
        + e2 * (I * apm * r(k(1) + f(0) * k(1) - k(0) * f(1)) + I * amp * r(f(0) * k(1) - k(0) * f(1)));
    comp[1][0] += e1 * amm * r(1.0 + f(0)) + e2 * amm * r(f(0)) + e1c * app * r(c_pp) + e2c * app * r(c_pm);

    // 3-component
    comp[2][2] += e1 * (s2 * app * r(k(1) * k(2) + 2.0 / 3.0 * f(1) * f(2)))
        + e2 * (s2 * app * r(2.0 / 3.0 * f(1) + k(1) * k(2) + 2.0 / 3.0 * f(1) * f(2)));
    comp[2][1] += e1 * (I * apm * r(f(0) * k(1) - k(0) * f(1)) + I * amp * r(k(1) + f(0) * k(1) - k(0) * f(1)))
        + e2 * (-I * apm * r(k(0) - k(1) - f(0) * k(1) + k(0) * f(1))
            - I * amp * r(k(0) - f(0) * k(1) + k(0) * f(1)));
    comp[2][0] += e1 * amm * r(f(0)) + e2 * amm * r(1.0 + f(0)) + e1c * app * r(c_pm) + e2c * app * r(c_pp);

    // 4-component
    let leak_3 = 0.2 * k(1) * f(2) - 1.0 / 3.0 * f(1) * k(2);
    let back_1 = k(0) - k(1) + 2.0 / 3.0 * k(0) * f(1) - 2.0 * f(0) * k(1);
    comp[3][3] += (e1 + e2) * (-2.0 * s6 * I * app * r(leak_3));
    comp[3][2] += e1
        * (s2 * apm * r(2.0 / 3.0 * f(0) * f(1) + k(0) * k(1))
            + s2 * amp * r(2.0 / 3.0 * f(1) + 2.0 / 3.0 * f(0) * f(1) + k(0) * k(1)))
        + e2 * (s2 * apm * r(2.0 / 3.0 * f(1) + 2.0 / 3.0 * f(0) * f(1) + k(0) * k(1))
            + s2 * amp * r(2.0 / 3.0 * f(0) * f(1) + k(0) * k(1)));
    comp[3][1] += (e1 + e2) * (I * amm * r(k(0))) + (e1c + e2c) * (I * app * r(back_1));
    comp[3][0] += e1c * (apm * r(1.0 + f(0)) + amp * r(f(0))) + e2c * (apm * r(f(0)) + amp * r(1.0 + f(0)));

    let mut out = vec![ZERO; layout.dim()];
    for (a, row) in comp.iter().enumerate() {
        for (m, z) in row.iter().enumerate() {
            out[layout.index(a, m)] = *z;
        }
    }
    Ok(out)
}
