// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Driven Tavis–Cummings model on a truncated Fock space.
//!
//! The Hilbert space is `(C²)^{⊗n} ⊗ C^{N_max+1}`. Basis index is
//! `atomic * (N_max + 1) + photon`; within the atomic register atom 1 is the
//! leftmost tensor factor and `|+⟩` comes before `|−⟩`, so for two atoms the
//! atomic order is `(++, +−, −+, −−)`.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, kron, kron_all, ComplexMatrix, C64, ONE};

/// Smallest photon cutoff accepted. The ansatz action couples `|0⟩` up to `|3⟩`.
pub const MIN_FOCK_CUTOFF: usize = 4;

/// One classical drive tone `h (σ₊ e^{i(Ωt+φ)} + h.c.)` acting on a single atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub h: f64,
    /// Drive angular frequency Ω.
    pub frequency: f64,
    pub phi: f64,
}

impl DriveTone {
    pub const fn off() -> Self {
        Self { h: 0.0, frequency: 0.0, phi: 0.0 }
    }

    /// Phase `Ωt + φ` of the σ₊ component.
    pub fn phase(&self, t: f64) -> f64 {
        self.frequency * t + self.phi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    /// Cavity mode frequency ω.
    pub omega: f64,
    /// Atomic level splitting Δ.
    pub delta: f64,
    /// Atom–cavity coupling g.
    pub g: f64,
    pub drives: Vec<DriveTone>,
}

impl ModelParams {
    /// Undriven model with all frequencies set to `g = 1`.
    pub fn undriven(n_atoms: usize) -> Self {
        Self { n_atoms, omega: 1.0, delta: 1.0, g: 1.0, drives: vec![DriveTone::off(); n_atoms] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidParams("n_atoms must be at least 1".into()));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParams(format!("g must be positive and finite, got {}", self.g)));
        }
        if !self.omega.is_finite() || !self.delta.is_finite() {
            return Err(Error::InvalidParams("omega and delta must be finite".into()));
        }
        if self.drives.len() != self.n_atoms {
            return Err(Error::InvalidParams(format!(
                "expected {} drive tones, got {}",
                self.n_atoms,
                self.drives.len()
            )));
        }
        for (j, d) in self.drives.iter().enumerate() {
            if !(d.h >= 0.0 && d.h.is_finite()) {
                return Err(Error::InvalidParams(format!("drive {} coupling h must be finite and >= 0", j + 1)));
            }
            if !d.frequency.is_finite() || !d.phi.is_finite() {
                return Err(Error::InvalidParams(format!("drive {} frequency/phase must be finite", j + 1)));
            }
        }
        Ok(())
    }

    /// Same checks as [`ModelParams::validate`] but also admits `g = 0`.
    pub fn validate_allowing_zero_coupling(&self) -> Result<()> {
        if self.g == 0.0 {
            return Self { g: 1.0, ..self.clone() }.validate();
        }
        self.validate()
    }

    /// Checks the cavity/atom resonance ω = Δ that the rotated frame relies on.
    pub fn require_cavity_resonance(&self) -> Result<()> {
        let scale = self.omega.abs().max(self.delta.abs()).max(1.0);
        if (self.omega - self.delta).abs() > 1e-12 * scale {
            return Err(Error::Unsupported(format!(
                "rotated frame requires omega == delta (got omega = {}, delta = {})",
                self.omega, self.delta
            )));
        }
        Ok(())
    }

    pub fn require_two_atoms(&self) -> Result<()> {
        if self.n_atoms != 2 {
            return Err(Error::Unsupported(format!("this construction needs n_atoms = 2, got {}", self.n_atoms)));
        }
        Ok(())
    }

    pub fn drive(&self, j: usize) -> &DriveTone {
        &self.drives[j]
    }
}

/// Tensor layout of atoms ⊗ truncated cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertLayout {
    pub n_atoms: usize,
    pub fock_cutoff: usize,
}

impl HilbertLayout {
    pub fn new(n_atoms: usize, fock_cutoff: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParams("n_atoms must be at least 1".into()));
        }
        if fock_cutoff < MIN_FOCK_CUTOFF {
            return Err(Error::InvalidParams(format!(
                "fock_cutoff must be >= {MIN_FOCK_CUTOFF}, got {fock_cutoff}"
            )));
        }
        Ok(Self { n_atoms, fock_cutoff })
    }

    pub fn atomic_dim(&self) -> usize {
        1 << self.n_atoms
    }

    pub fn fock_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.atomic_dim() * self.fock_dim()
    }

    #[inline]
    pub fn index(&self, atomic: usize, photons: usize) -> usize {
        debug_assert!(atomic < self.atomic_dim() && photons <= self.fock_cutoff);
        atomic * self.fock_dim() + photons
    }

    /// Inverse of [`index`](Self::index): `(atomic, photons)`.
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.fock_dim(), index % self.fock_dim())
    }

    /// Indices of `|atomic⟩ ⊗ |0⟩` for every atomic basis state.
    pub fn ground_sector(&self) -> Vec<usize> {
        (0..self.atomic_dim()).map(|a| self.index(a, 0)).collect()
    }

    /// Indices with photon number `<= max_photons`.
    pub fn photon_interior(&self, max_photons: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.split(i).1 <= max_photons).collect()
    }

    /// Embeds amplitudes on the atomic register as `amps ⊗ |photons⟩`.
    pub fn embed(&self, amps: &[C64], photons: usize) -> Vec<C64> {
        assert_eq!(amps.len(), self.atomic_dim());
        let mut v = vec![C64::new(0.0, 0.0); self.dim()];
        for (a, z) in amps.iter().enumerate() {
            v[self.index(a, photons)] = *z;
        }
        v
    }
}

/// Dense operator on the full space of a [`HilbertLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub layout: HilbertLayout,
    pub matrix: ComplexMatrix,
}

impl Operator {
    pub fn new(layout: HilbertLayout, matrix: ComplexMatrix) -> Self {
        assert_eq!(matrix.rows(), layout.dim(), "operator dimension must match layout");
        assert!(matrix.is_square());
        Self { layout, matrix }
    }

    pub fn zeros(layout: HilbertLayout) -> Self {
        Self::new(layout, ComplexMatrix::zeros(layout.dim(), layout.dim()))
    }

    /// `atomic ⊗ photonic`.
    pub fn from_factors(layout: HilbertLayout, atomic: &ComplexMatrix, photonic: &ComplexMatrix) -> Self {
        Self::new(layout, kron(atomic, photonic))
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Matrix element block `⟨a ⊗ m| O |b ⊗ m'⟩` restricted to the given photon numbers.
    pub fn atomic_block(&self, row_photons: usize, col_photons: usize) -> ComplexMatrix {
        let l = self.layout;
        let rows: Vec<usize> = (0..l.atomic_dim()).map(|a| l.index(a, row_photons)).collect();
        let cols: Vec<usize> = (0..l.atomic_dim()).map(|a| l.index(a, col_photons)).collect();
        self.matrix.select(&rows, &cols)
    }
}

impl Deref for Operator {
    type Target = ComplexMatrix;
    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Single-atom Pauli-type operator selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Plus,
    Minus,
    Z,
}

pub fn sigma(s: Spin) -> ComplexMatrix {
    match s {
        Spin::Plus => ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]),
        Spin::Minus => ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]),
        Spin::Z => ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]),
    }
}

/// Cavity annihilation operator on `C^{N_max+1}`: `a|m⟩ = √m |m−1⟩`.
pub fn annihilation(layout: &HilbertLayout) -> ComplexMatrix {
    let d = layout.fock_dim();
    ComplexMatrix::from_fn(d, d, |i, j| if j == i + 1 { c((j as f64).sqrt(), 0.0) } else { c(0.0, 0.0) })
}

pub fn creation(layout: &HilbertLayout) -> ComplexMatrix {
    annihilation(layout).dagger()
}

pub fn number_operator(layout: &HilbertLayout) -> ComplexMatrix {
    let d = layout.fock_dim();
    ComplexMatrix::from_diag(&(0..d).map(|m| c(m as f64, 0.0)).collect::<Vec<_>>())
}

fn check_atom(layout: &HilbertLayout, j: usize) -> Result<()> {
    if j == 0 || j > layout.n_atoms {
        return Err(Error::OutOfRange(format!("atom index {j} not in 1..={}", layout.n_atoms)));
    }
    Ok(())
}

/// `1₂ ⊗ … ⊗ σ_s ⊗ … ⊗ 1₂` on the atomic register only (atom `j` is 1-based).
pub fn atomic_operator(n_atoms: usize, j: usize, s: Spin) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let op = sigma(s);
    let factors: Vec<&ComplexMatrix> = (1..=n_atoms).map(|k| if k == j { &op } else { &id }).collect();
    kron_all(factors)
}

/// `σ^{(s)}_j ⊗ 1` on the full space.
pub fn atom_operator(layout: &HilbertLayout, j: usize, s: Spin) -> Result<Operator> {
    check_atom(layout, j)?;
    let atomic = atomic_operator(layout.n_atoms, j, s);
    Ok(Operator::from_factors(*layout, &atomic, &ComplexMatrix::identity(layout.fock_dim())))
}

/// Collective spin operators on the atomic register.
#[derive(Debug, Clone)]
pub struct CollectiveOps {
    pub s_plus: ComplexMatrix,
    pub s_minus: ComplexMatrix,
    pub s_3: ComplexMatrix,
}

/// `S₊ = Σσ⁺_j`, `S₋ = Σσ⁻_j`, `S₃ = ½Σσ³_j` (atomic factor only).
pub fn collective_ops(layout: &HilbertLayout) -> CollectiveOps {
    let n = layout.n_atoms;
    let l = layout.atomic_dim();
    let sum = |s: Spin| {
        (1..=n).fold(ComplexMatrix::zeros(l, l), |acc, j| &acc + &atomic_operator(n, j, s))
    };
    CollectiveOps { s_plus: sum(Spin::Plus), s_minus: sum(Spin::Minus), s_3: sum(Spin::Z).scale_real(0.5) }
}

/// `S₊ ⊗ a + S₋ ⊗ a†`, the generator of the atom–cavity exchange.
pub fn exchange_generator(layout: &HilbertLayout) -> Operator {
    let s = collective_ops(layout);
    let a = annihilation(layout);
    let ad = a.dagger();
    Operator::new(*layout, &kron(&s.s_plus, &a) + &kron(&s.s_minus, &ad))
}

/// `S₃ ⊗ 1 + 1 ⊗ N`, conserved by the undriven Hamiltonian.
pub fn excitation_operator(layout: &HilbertLayout) -> Operator {
    let s = collective_ops(layout);
    let id_f = ComplexMatrix::identity(layout.fock_dim());
    let id_a = ComplexMatrix::identity(layout.atomic_dim());
    Operator::new(*layout, &kron(&s.s_3, &id_f) + &kron(&id_a, &number_operator(layout)))
}

/// Tavis–Cummings Hamiltonian `ω 1⊗a†a + Δ S₃⊗1 + g(S₊⊗a + S₋⊗a†)`.
pub fn hamiltonian_h0(params: &ModelParams, layout: &HilbertLayout) -> Operator {
    let s = collective_ops(layout);
    let id_f = ComplexMatrix::identity(layout.fock_dim());
    let id_a = ComplexMatrix::identity(layout.atomic_dim());
    let mut h = kron(&id_a, &number_operator(layout)).scale_real(params.omega);
    h.axpy(c(params.delta, 0.0), &kron(&s.s_3, &id_f));
    h.axpy(c(params.g, 0.0), &exchange_generator(layout));
    Operator::new(*layout, h)
}

/// The atomic part of the classical drive `Σ_j h_j(σ⁺_j e^{i(Ω_j t+φ_j)} + h.c.)`.
pub fn atomic_drive(params: &ModelParams, t: f64) -> ComplexMatrix {
    let n = params.n_atoms;
    let l = 1usize << n;
    let mut v = ComplexMatrix::zeros(l, l);
    for (idx, d) in params.drives.iter().enumerate() {
        if d.h == 0.0 {
            continue;
        }
        let e = C64::from_polar(d.h, d.phase(t));
        v.axpy(e, &atomic_operator(n, idx + 1, Spin::Plus));
        v.axpy(e.conj(), &atomic_operator(n, idx + 1, Spin::Minus));
    }
    v
}

/// Drive term `V(t)` on the full space.
pub fn drive_v(params: &ModelParams, layout: &HilbertLayout, t: f64) -> Operator {
    Operator::from_factors(*layout, &atomic_drive(params, t), &ComplexMatrix::identity(layout.fock_dim()))
}

/// Full `H(t)` assembled atom by atom, without collective operators.
pub fn hamiltonian_full(params: &ModelParams, layout: &HilbertLayout, t: f64) -> Operator {
    let n = layout.n_atoms;
    let a = annihilation(layout);
    let ad = a.dagger();
    let id_f = ComplexMatrix::identity(layout.fock_dim());
    let id_a = ComplexMatrix::identity(layout.atomic_dim());
    let mut h = kron(&id_a, &number_operator(layout)).scale_real(params.omega);
    for j in 1..=n {
        h.axpy(c(params.delta / 2.0, 0.0), &kron(&atomic_operator(n, j, Spin::Z), &id_f));
        h.axpy(c(params.g, 0.0), &kron(&atomic_operator(n, j, Spin::Plus), &a));
        h.axpy(c(params.g, 0.0), &kron(&atomic_operator(n, j, Spin::Minus), &ad));
        let d = params.drives[j - 1];
        let e = C64::from_polar(d.h, d.phase(t));
        h.axpy(e, &kron(&atomic_operator(n, j, Spin::Plus), &id_f));
        h.axpy(e.conj(), &kron(&atomic_operator(n, j, Spin::Minus), &id_f));
    }
    Operator::new(*layout, h)
}

/// Basis vector `|m⟩` of the cavity mode.
pub fn fock_ket(layout: &HilbertLayout, m: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); layout.fock_dim()];
    v[m] = ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layout(n: usize, cutoff: usize) -> HilbertLayout {
        HilbertLayout::new(n, cutoff).unwrap()
    }

    fn random_params(rng: &mut impl Rng, n: usize) -> ModelParams {
        ModelParams {
            n_atoms: n,
            omega: rng.gen_range(0.5..2.0),
            delta: rng.gen_range(0.5..2.0),
            g: rng.gen_range(0.2..1.5),
            drives: (0..n)
                .map(|_| DriveTone {
                    h: rng.gen_range(0.0..0.5),
                    frequency: rng.gen_range(-3.0..3.0),
                    phi: rng.gen_range(0.0..std::f64::consts::TAU),
                })
                .collect(),
        }
    }

    #[test]
    fn layout_rejects_small_cutoff() {
        assert!(HilbertLayout::new(2, 3).is_err());
        assert!(HilbertLayout::new(0, 8).is_err());
        assert_eq!(layout(2, 12).dim(), 52);
    }

    #[test]
    fn annihilation_on_low_fock_states() {
        let l = layout(1, 6);
        let a = annihilation(&l);
        let ket0 = ComplexMatrix::column(&fock_ket(&l, 0));
        assert_eq!(a.matmul(&ket0).max_abs(), 0.0);
        let ket1 = ComplexMatrix::column(&fock_ket(&l, 1));
        assert_eq!(a.matmul(&ket1), ket0);
        let n = a.dagger().matmul(&a);
        assert!(n.max_abs_diff(&number_operator(&l)) < 1e-15);
    }

    #[test]
    fn creation_has_sqrt_subdiagonal() {
        let l = layout(1, 4);
        let ad = creation(&l);
        for m in 0..4 {
            assert!((ad[(m + 1, m)].re - ((m + 1) as f64).sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn atom_operator_structure() {
        assert_eq!(atomic_operator(1, 1, Spin::Z), sigma(Spin::Z));
        let expected = kron(&ComplexMatrix::identity(2), &sigma(Spin::Plus));
        assert_eq!(atomic_operator(2, 2, Spin::Plus), expected);
        let l = layout(2, 4);
        let s1 = atom_operator(&l, 1, Spin::Plus).unwrap();
        let s2 = atom_operator(&l, 2, Spin::Minus).unwrap();
        assert!(s1.commutator(&s2).max_abs() < 1e-15);
        assert!(matches!(atom_operator(&l, 3, Spin::Z), Err(Error::OutOfRange(_))));
        assert!(matches!(atom_operator(&l, 0, Spin::Z), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn collective_ops_satisfy_su2() {
        for n in 1..=3 {
            let s = collective_ops(&layout(n, 4));
            assert!(s.s_3.commutator(&s.s_plus).max_abs_diff(&s.s_plus) < 1e-13);
            assert!(s.s_3.commutator(&s.s_minus).max_abs_diff(&(-&s.s_minus)) < 1e-13);
            assert!(s.s_plus.commutator(&s.s_minus).max_abs_diff(&s.s_3.scale_real(2.0)) < 1e-13);
        }
        let s1 = collective_ops(&layout(1, 4));
        assert_eq!(s1.s_3, sigma(Spin::Z).scale_real(0.5));
        let s2 = collective_ops(&layout(2, 4));
        let (mut ev, _) = crate::linalg::hermitian_eig(&s2.s_3).unwrap();
        ev.reverse();
        let expected = [1.0, 0.0, 0.0, -1.0];
        for (a, b) in ev.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn h0_vacuum_eigenvector_without_coupling() {
        let l = layout(2, 6);
        let p = ModelParams { g: 1.0, ..ModelParams::undriven(2) };
        let mut p0 = p.clone();
        // g = 0 is not a valid parameter set, but H0 itself is still defined.
        p0.g = 0.0;
        let h = hamiltonian_h0(&p0, &l);
        let idx = l.index(3, 0);
        let v = ComplexMatrix::column(&l.embed(&[ZERO, ZERO, ZERO, ONE], 0));
        let hv = h.matmul(&v);
        assert!((hv[(idx, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(hv.max_abs_diff(&v.scale_real(-1.0)) < 1e-15);
        assert!(hamiltonian_h0(&p, &l).hermiticity_defect() < 1e-14);
    }

    #[test]
    fn single_atom_h0_is_jaynes_cummings() {
        let l = layout(1, 8);
        let p = ModelParams { omega: 1.3, delta: 0.7, g: 0.9, ..ModelParams::undriven(1) };
        let h = hamiltonian_h0(&p, &l);
        for m in 0..l.fock_cutoff {
            let up = l.index(0, m);
            let down = l.index(1, m + 1);
            let block = h.select(&[up, down], &[up, down]);
            let coupling = p.g * ((m + 1) as f64).sqrt();
            let expected = ComplexMatrix::from_real_rows(&[
                [p.omega * m as f64 + p.delta / 2.0, coupling],
                [coupling, p.omega * (m + 1) as f64 - p.delta / 2.0],
            ]);
            assert!(block.max_abs_diff(&expected) < 1e-14);
            // Nothing else couples into this excitation sector.
            for k in 0..l.dim() {
                if k != up && k != down {
                    assert_eq!(h[(k, up)], ZERO);
                    assert_eq!(h[(k, down)], ZERO);
                }
            }
        }
    }

    #[test]
    fn drive_v_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = layout(1, 4);
        let p = ModelParams::undriven(1);
        assert_eq!(drive_v(&p, &l, 0.3).max_abs(), 0.0);
        let p = ModelParams { drives: vec![DriveTone { h: 0.4, frequency: 2.0, phi: 0.0 }], ..p };
        let sx = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        assert!(atomic_drive(&p, 0.0).max_abs_diff(&sx.scale_real(0.4)) < 1e-15);
        let l2 = layout(2, 5);
        for _ in 0..10 {
            let p = random_params(&mut rng, 2);
            let t = rng.gen_range(-10.0..10.0);
            assert!(drive_v(&p, &l2, t).hermiticity_defect() < 1e-14);
        }
    }

    #[test]
    fn h0_conserves_excitation_number() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=3 {
            let l = layout(n, 6);
            let p = random_params(&mut rng, n);
            let h = hamiltonian_h0(&p, &l);
            let x = excitation_operator(&l);
            let comm = h.commutator(&x);
            let interior = l.photon_interior(l.fock_cutoff - 1);
            assert!(comm.select(&interior, &interior).max_abs() < 1e-12);
        }
    }

    #[test]
    fn groupings_of_full_hamiltonian_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=3 {
            let l = layout(n, 5);
            let p = random_params(&mut rng, n);
            let t = rng.gen_range(0.0..20.0);
            let grouped = &*hamiltonian_h0(&p, &l) + &*drive_v(&p, &l, t);
            let direct = hamiltonian_full(&p, &l, t);
            assert!(grouped.max_abs_diff(&direct) < 1e-14);
        }
    }

    #[test]
    fn params_validation() {
        let mut p = ModelParams::undriven(2);
        assert!(p.validate().is_ok());
        p.g = 0.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::undriven(2);
        p.drives.pop();
        assert!(p.validate().is_err());
        let mut p = ModelParams::undriven(2);
        p.drives[0].h = -1.0;
        assert!(p.validate().is_err());
        let mut p = ModelParams::undriven(2);
        p.omega = f64::NAN;
        assert!(p.validate().is_err());
        let p = ModelParams { delta: 1.5, ..ModelParams::undriven(2) };
        assert!(p.require_cavity_resonance().is_err());
    }
}
