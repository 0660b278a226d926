// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Closed-form two-atom exchange propagator `exp(−itg(S₊⊗a + S₋⊗a†))`.
//!
//! The propagator is a 4×4 matrix of cavity operators. Each block is a
//! function of the number operator `N` (a diagonal) multiplied on the right by
//! a ladder word (`1`, `a`, `a†`, `a²`, `a†²`), in that order. The scalar
//! profiles are
//!
//! ```text
//! f(m) = (−1 + cos(tg√(2(2m+1)))) / 2
//! k(m) = sin(tg√(2(2m+1))) / √(2(2m+1))
//! ```
//!
//! Terms with `N − 1` shifts only ever multiply a vanishing ladder matrix
//! element at the bottom of the ladder; they are taken as zero there.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, expm, ComplexMatrix, C64, I, ZERO};
use crate::model::{exchange_generator, HilbertLayout, Operator};

/// Exchange frequency `√(2(2m+1))` of the photon-number-`m` sector, in units of g.
pub fn sector_frequency(m: usize) -> f64 {
    (2.0 * (2.0 * m as f64 + 1.0)).sqrt()
}

/// Tabulated `f(m)` and `k(m)` at fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct FkFunctions {
    pub t: f64,
    pub g: f64,
    f: Vec<f64>,
    k: Vec<f64>,
}

impl FkFunctions {
    /// Tabulates `m = 0..=max_m`.
    pub fn new(t: f64, g: f64, max_m: usize) -> Self {
        let (f, k) = (0..=max_m)
            .map(|m| {
                let w = sector_frequency(m);
                let (s, co) = (t * g * w).sin_cos();
                ((co - 1.0) / 2.0, s / w)
            })
            .unzip();
        Self { t, g, f, k }
    }

    pub fn max_m(&self) -> usize {
        self.f.len() - 1
    }

    /// `f(m)`; zero for negative `m`.
    pub fn f(&self, m: isize) -> f64 {
        if m < 0 {
            0.0
        } else {
            self.f[m as usize]
        }
    }

    /// `k(m)`; zero for negative `m`.
    pub fn k(&self, m: isize) -> f64 {
        if m < 0 {
            0.0
        } else {
            self.k[m as usize]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ladder {
    One,
    A,
    Ad,
    A2,
    Ad2,
}

impl Ladder {
    /// Column photon number reached from row `m`, with the matrix element.
    fn element(self, m: usize, cutoff: usize) -> Option<(usize, f64)> {
        let mf = m as f64;
        let (col, val) = match self {
            Ladder::One => (m as isize, 1.0),
            Ladder::A => (m as isize + 1, (mf + 1.0).sqrt()),
            Ladder::Ad => (m as isize - 1, mf.sqrt()),
            Ladder::A2 => (m as isize + 2, ((mf + 1.0) * (mf + 2.0)).sqrt()),
            Ladder::Ad2 => (m as isize - 2, (mf * (mf - 1.0)).sqrt()),
        };
        (col >= 0 && col as usize <= cutoff).then_some((col as usize, val))
    }
}

/// Diagonal profile of block `(i, j)` at row photon number `m` and its ladder word.
fn block(fk: &FkFunctions, i: usize, j: usize, m: usize) -> (C64, Ladder) {
    let mi = m as isize;
    let mf = m as f64;
    let f = |s: isize| fk.f(mi + s);
    let k = |s: isize| fk.k(mi + s);
    match (i, j) {
        (0, 0) => (c((2.0 * mf + 2.0) / (2.0 * mf + 3.0) * f(1) + 1.0, 0.0), Ladder::One),
        (0, 1) | (0, 2) => (-I * k(1), Ladder::A),
        (0, 3) => (c(2.0 / (2.0 * mf + 3.0) * f(1), 0.0), Ladder::A2),
        (1, 0) | (2, 0) => (-I * k(0), Ladder::Ad),
        (1, 1) | (2, 2) => (c(f(0) + 1.0, 0.0), Ladder::One),
        (1, 2) | (2, 1) => (c(f(0), 0.0), Ladder::One),
        (1, 3) | (2, 3) => (-I * k(0), Ladder::A),
        (3, 0) => {
            // a†² has no element landing on rows 0 and 1.
            let v = if m >= 2 { 2.0 / (2.0 * mf - 1.0) * f(-1) } else { 0.0 };
            (c(v, 0.0), Ladder::Ad2)
        }
        (3, 1) | (3, 2) => (-I * k(-1), Ladder::Ad),
        (3, 3) => {
            let v = if m >= 1 { 2.0 * mf / (2.0 * mf - 1.0) * f(-1) } else { 0.0 };
            (c(v + 1.0, 0.0), Ladder::One)
        }
        _ => unreachable!("block index out of range"),
    }
}

/// Sparse realisation of the closed-form propagator on a truncated space.
#[derive(Debug, Clone)]
pub struct ExpInteraction {
    layout: HilbertLayout,
    fk: FkFunctions,
    entries: Vec<(usize, usize, C64)>,
}

impl ExpInteraction {
    pub fn new(t: f64, g: f64, layout: &HilbertLayout) -> Result<Self> {
        if layout.n_atoms != 2 {
            return Err(Error::Unsupported(format!(
                "closed-form exchange propagator exists for n_atoms = 2 only, got {}",
                layout.n_atoms
            )));
        }
        let fk = FkFunctions::new(t, g, layout.fock_cutoff + 1);
        let cutoff = layout.fock_cutoff;
        let mut entries = Vec::with_capacity(16 * layout.fock_dim());
        for i in 0..4 {
            for j in 0..4 {
                for m in 0..=cutoff {
                    let (coef, ladder) = block(&fk, i, j, m);
                    if let Some((col, val)) = ladder.element(m, cutoff) {
                        let z = coef * val;
                        if z != ZERO {
                            entries.push((layout.index(i, m), layout.index(j, col), z));
                        }
                    }
                }
            }
        }
        Ok(Self { layout: *layout, fk, entries })
    }

    pub fn fk(&self) -> &FkFunctions {
        &self.fk
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    /// Copy with the atomic block `(i, j)` (0-based) multiplied by −1.
    ///
    /// Used as a negative control for the expm comparison.
    pub fn with_block_negated(mut self, i: usize, j: usize) -> Self {
        let fd = self.layout.fock_dim();
        for (r, col, z) in &mut self.entries {
            if *r / fd == i && *col / fd == j {
                *z = -*z;
            }
        }
        self
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let d = self.layout.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for &(r, col, z) in &self.entries {
            m[(r, col)] += z;
        }
        m
    }

    pub fn to_operator(&self) -> Operator {
        Operator::new(self.layout, self.to_matrix())
    }

    /// `E · x` for a block of column vectors `x`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.rows(), self.layout.dim());
        let n = x.cols();
        let mut out = ComplexMatrix::zeros(x.rows(), n);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for &(r, col, z) in &self.entries {
            let (d, s) = (&mut dst[r * n..(r + 1) * n], &src[col * n..(col + 1) * n]);
            for (o, v) in d.iter_mut().zip(s) {
                *o += z * v;
            }
        }
        out
    }

    /// `E† · x`.
    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.rows(), self.layout.dim());
        let n = x.cols();
        let mut out = ComplexMatrix::zeros(x.rows(), n);
        let src = x.as_slice();
        let dst = out.as_mut_slice();
        for &(r, col, z) in &self.entries {
            let zc = z.conj();
            let (d, s) = (&mut dst[col * n..(col + 1) * n], &src[r * n..(r + 1) * n]);
            for (o, v) in d.iter_mut().zip(s) {
                *o += zc * v;
            }
        }
        out
    }
}

/// The closed-form `exp(−itg(S₊⊗a + S₋⊗a†))` as a dense operator.
pub fn exp_interaction(t: f64, g: f64, layout: &HilbertLayout) -> Result<Operator> {
    Ok(ExpInteraction::new(t, g, layout)?.to_operator())
}

/// Numerical reference `expm(−itg(S₊⊗a + S₋⊗a†))` on the truncated space.
pub fn exp_interaction_numeric(t: f64, g: f64, layout: &HilbertLayout) -> Result<Operator> {
    let x = exchange_generator(layout);
    Ok(Operator::new(*layout, expm(&x.scale(c(0.0, -t * g)))?))
}

/// Location of the worst entrywise disagreement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntryLocation {
    pub row_atomic: usize,
    pub row_photons: usize,
    pub col_atomic: usize,
    pub col_photons: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormComparison {
    pub t: f64,
    pub max_err: f64,
    pub worst: EntryLocation,
}

/// Compares a closed-form propagator against `expm` on photon numbers `<= N_max − 2`.
///
/// Every excitation sector that touches that interior fits inside the
/// truncation, so the two agree to rounding there.
pub fn compare_with_expm(closed: &ExpInteraction, g: f64) -> Result<ClosedFormComparison> {
    let layout = *closed.layout();
    let t = closed.fk().t;
    let numeric = exp_interaction_numeric(t, g, &layout)?;
    let dense = closed.to_matrix();
    let interior = layout.photon_interior(layout.fock_cutoff - 2);
    let mut max_err = 0.0;
    let mut worst = (0, 0);
    for &r in &interior {
        for &col in &interior {
            let e = (dense[(r, col)] - numeric[(r, col)]).norm();
            if e > max_err {
                max_err = e;
                worst = (r, col);
            }
        }
    }
    let (ra, rp) = layout.split(worst.0);
    let (ca, cp) = layout.split(worst.1);
    Ok(ClosedFormComparison {
        t,
        max_err,
        worst: EntryLocation { row_atomic: ra, row_photons: rp, col_atomic: ca, col_photons: cp },
    })
}
