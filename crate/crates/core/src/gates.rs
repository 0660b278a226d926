// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Gate algebra: swap, controlled-σz extraction, Walsh–Hadamard conjugation
//! and the three-qubit CCNOT network.
//!
//! Qubit 0 is the leftmost tensor factor. The computational `|1⟩` of a qubit is
//! its second basis state, which for an atom is `|−⟩`.

use crate::error::{Error, Result};
use crate::linalg::{c, kron, kron_all, ComplexMatrix, C64, ONE, ZERO};

/// Unitarity bound for gates built from exact matrices.
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub matrix: ComplexMatrix,
    pub label: String,
}

impl Gate {
    /// Builds a gate, rejecting matrices that are not unitary to [`UNITARITY_TOL`].
    pub fn new(matrix: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        let defect = matrix.unitarity_defect();
        if !matrix.is_square() || !(defect < UNITARITY_TOL) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { matrix, label: label.into() })
    }

    /// Wraps a matrix obtained from simulated dynamics.
    ///
    /// Truncated dynamics leak out of the computational subspace, so the result
    /// is only approximately unitary; [`Gate::unitarity_defect`] says by how much.
    pub fn measured(matrix: ComplexMatrix, label: impl Into<String>) -> Self {
        Self { matrix, label: label.into() }
    }

    fn exact(matrix: ComplexMatrix, label: &str) -> Self {
        Self::new(matrix, label).expect("exact gate constructions are unitary")
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.dagger(), label: format!("{}†", self.label) }
    }

    /// `self` followed by `next`, i.e. `next · self`.
    pub fn then(&self, next: &Gate) -> Self {
        Self { matrix: next.matrix.matmul(&self.matrix), label: format!("{} ; {}", self.label, next.label) }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

/// Exchange of the two qubits.
pub fn swap_p() -> Gate {
    Gate::exact(
        ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]),
        "P",
    )
}

/// `diag(1, 1, 1, −1)`.
pub fn controlled_z() -> Gate {
    Gate::exact(ComplexMatrix::from_diag(&[ONE, ONE, ONE, -ONE]), "Cz")
}

/// Target controlled NOT, control on qubit 0.
pub fn cnot() -> Gate {
    Gate::exact(
        ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]),
        "CNOT",
    )
}

/// Target Toffoli gate: identity except σ₁ on the `|11·⟩` block.
pub fn ccnot() -> Gate {
    let mut m = ComplexMatrix::identity(8);
    m[(6, 6)] = ZERO;
    m[(7, 7)] = ZERO;
    m[(6, 7)] = ONE;
    m[(7, 6)] = ONE;
    Gate::exact(m, "CCNOT")
}

/// Removes a global phase so the first non-negligible diagonal entry is real positive.
pub fn strip_global_phase(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows().min(m.cols());
    let pivot = (0..n).map(|i| m[(i, i)]).find(|z| z.norm() > 1e-12);
    match pivot {
        Some(z) => m.scale(C64::from_polar(1.0, -z.arg())),
        None => m.clone(),
    }
}

/// Swap-corrects the ground-sector propagator at `t₀` and compares it with `Cz`.
///
/// Returns the phase-stripped `P·u` when it lies within `tol` (max entry) of
/// `diag(1, 1, 1, −1)`.
pub fn controlled_z_from_dynamics(u_t0: &ComplexMatrix, tol: f64) -> Result<Gate> {
    if u_t0.rows() != 4 || u_t0.cols() != 4 {
        return Err(Error::Dimension(format!("expected 4×4, got {}×{}", u_t0.rows(), u_t0.cols())));
    }
    let m = strip_global_phase(&swap_p().matrix.matmul(u_t0));
    let distance = m.max_abs_diff(&controlled_z().matrix);
    if !(distance <= tol) {
        return Err(Error::Infidelity { distance, tolerance: tol });
    }
    Ok(Gate::measured(m, "P·U(t0)"))
}

/// `W = (1/√2)[[1, 1], [1, −1]]`.
pub fn walsh() -> Gate {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Gate::exact(ComplexMatrix::from_real_rows(&[[s, s], [s, -s]]), "W")
}

/// `(1 ⊗ W) · cz · (1 ⊗ W)`.
pub fn cnot_via_conjugation(cz: &Gate) -> Gate {
    let w = kron(&ComplexMatrix::identity(2), &walsh().matrix);
    Gate::measured(w.matmul(&cz.matrix).matmul(&w), format!("(1⊗W){}(1⊗W)", cz.label))
}

/// `u` on `target`, conditioned on `control` being `|1⟩`.
pub fn controlled(u: &ComplexMatrix, n_qubits: usize, control: usize, target: usize) -> Result<Gate> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Dimension("controlled gates take a 2×2 target operation".into()));
    }
    if control >= n_qubits || target >= n_qubits || control == target {
        return Err(Error::OutOfRange(format!("control {control}, target {target} on {n_qubits} qubits")));
    }
    let id = ComplexMatrix::identity(2);
    let p0 = ComplexMatrix::from_diag(&[ONE, ZERO]);
    let p1 = ComplexMatrix::from_diag(&[ZERO, ONE]);
    let factors = |on: bool| -> Vec<&ComplexMatrix> {
        (0..n_qubits)
            .map(|q| match (q == control, q == target, on) {
                (true, _, false) => &p0,
                (true, _, true) => &p1,
                (false, true, true) => u,
                _ => &id,
            })
            .collect()
    };
    let m = &kron_all(factors(false)) + &kron_all(factors(true));
    Gate::new(m, format!("C{control}->{target}"))
}

/// Controlled NOT between a pair of three qubits, built from the two-qubit gate.
///
/// Adjacent pairs embed `CNOT ⊗ 1` or `1 ⊗ CNOT`; the outer pair is obtained by
/// swapping the last two qubits around `CNOT ⊗ 1`. Reversed pairs additionally
/// conjugate the two-qubit gate by `P`.
pub fn pairwise_cnot(control: usize, target: usize) -> Result<Gate> {
    if control > 2 || target > 2 || control == target {
        return Err(Error::OutOfRange(format!("pair ({control}, {target}) on 3 qubits")));
    }
    let id = ComplexMatrix::identity(2);
    let p = swap_p().matrix;
    let two = if control < target { cnot().matrix } else { p.matmul(&cnot().matrix).matmul(&p) };
    let m = match (control.min(target), control.max(target)) {
        (0, 1) => kron(&two, &id),
        (1, 2) => kron(&id, &two),
        _ => {
            let s = kron(&id, &p);
            s.matmul(&kron(&two, &id)).matmul(&s)
        }
    };
    Gate::new(m, format!("CNOT({control}->{target})"))
}

/// `V = ½[[1+i, 1−i], [1−i, 1+i]]`, a square root of σ₁.
pub fn v_gate() -> Gate {
    let a = c(0.5, 0.5);
    let b = c(0.5, -0.5);
    Gate::exact(ComplexMatrix::from_rows(&[[a, b], [b, a]]), "V")
}

/// The five-gate network on `(x, y, z)` in circuit order, with `v` in place of V.
pub fn ccnot_network_with(v: &ComplexMatrix) -> Result<Gate> {
    let steps = [
        controlled(v, 3, 0, 2)?,
        controlled(v, 3, 1, 2)?,
        pairwise_cnot(0, 1)?,
        controlled(&v.dagger(), 3, 1, 2)?,
        pairwise_cnot(0, 1)?,
    ];
    let net = steps.iter().skip(1).fold(steps[0].clone(), |acc, g| acc.then(g));
    Gate::new(net.matrix, net.label)
}

pub fn ccnot_network() -> Result<Gate> {
    ccnot_network_with(&v_gate().matrix)
}

/// `|tr(a† b)| / dim`, insensitive to a global phase.
pub fn gate_fidelity(a: &Gate, b: &Gate) -> Result<f64> {
    if a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols() {
        return Err(Error::Dimension(format!("fidelity between dims {} and {}", a.dim(), b.dim())));
    }
    let tr: C64 = (0..a.matrix.rows())
        .flat_map(|i| (0..a.matrix.cols()).map(move |j| (i, j)))
        .map(|(i, j)| a.matrix[(i, j)].conj() * b.matrix[(i, j)])
        .sum();
    Ok(tr.norm() / a.dim() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rwa::{gate_time, rwa_propagator};
    use proptest::prelude::*;

    fn unitary_2x2() -> impl Strategy<Value = ComplexMatrix> {
        (0.0f64..6.3, 0.0f64..1.6, 0.0f64..6.3, 0.0f64..6.3).prop_map(|(a, th, b, d)| {
            let (s, co) = th.sin_cos();
            ComplexMatrix::from_rows(&[
                [C64::from_polar(co, a + b), C64::from_polar(s, a + d)],
                [-C64::from_polar(s, a - d), C64::from_polar(co, a - b)],
            ])
        })
    }

    proptest! {
        #[test]
        fn controlled_embedding_is_block_diagonal(u in unitary_2x2(), ctl in 0usize..3, tgt in 0usize..3) {
            prop_assume!(ctl != tgt);
            let cu = controlled(&u, 3, ctl, tgt).unwrap();
            let cud = controlled(&u.dagger(), 3, ctl, tgt).unwrap();
            prop_assert!(cu.matrix.matmul(&cud.matrix).max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
            let bit = |i: usize| (i >> (2 - ctl)) & 1;
            for i in 0..8 {
                for j in 0..8 {
                    if bit(i) != bit(j) {
                        prop_assert_eq!(cu.matrix[(i, j)], ZERO);
                    }
                    if bit(i) == 0 && bit(j) == 0 {
                        prop_assert_eq!(cu.matrix[(i, j)], if i == j { ONE } else { ZERO });
                    }
                }
            }
        }

        #[test]
        fn swap_exchanges_factors(x in prop::array::uniform4(-1.0f64..1.0), y in prop::array::uniform4(-1.0f64..1.0)) {
            let xv = ComplexMatrix::column(&[c(x[0], x[1]), c(x[2], x[3])]);
            let yv = ComplexMatrix::column(&[c(y[0], y[1]), c(y[2], y[3])]);
            let lhs = swap_p().matrix.matmul(&kron(&xv, &yv));
            prop_assert!(lhs.max_abs_diff(&kron(&yv, &xv)) < 1e-15);
        }

        #[test]
        fn fidelity_is_phase_invariant(u in unitary_2x2(), theta in 0.0f64..6.3) {
            let a = Gate::new(u.clone(), "u").unwrap();
            let b = Gate::new(u.scale(C64::from_polar(1.0, theta)), "u'").unwrap();
            prop_assert!((gate_fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn swap_is_an_involution() {
        let p = swap_p();
        assert_eq!(p.matrix.matmul(&p.matrix), ComplexMatrix::identity(4));
        assert_eq!(p.matrix[(1, 2)], ONE);
        assert_eq!(p.matrix[(2, 1)], ONE);
    }

    #[test]
    fn swap_turns_rwa_gate_into_controlled_z() {
        let h1 = 0.01;
        let u = rwa_propagator(gate_time(h1).unwrap(), h1, 0.0);
        let raw = swap_p().matrix.matmul(&u);
        assert!(raw.max_abs_diff(&controlled_z().matrix.scale_real(-1.0)) < 1e-12);
        let cz = controlled_z_from_dynamics(&u, 1e-12).unwrap();
        assert!(cz.matrix.max_abs_diff(&controlled_z().matrix) < 1e-12);
    }

    #[test]
    fn identity_is_not_a_controlled_z() {
        match controlled_z_from_dynamics(&ComplexMatrix::identity(4), 0.05) {
            Err(Error::Infidelity { distance, .. }) => assert!((distance - 2.0).abs() < 1e-15),
            other => panic!("expected infidelity error, got {other:?}"),
        }
        assert!(controlled_z_from_dynamics(&ComplexMatrix::identity(2), 1.0).is_err());
    }

    #[test]
    fn walsh_conjugation_gives_cnot() {
        let w = walsh().matrix;
        assert!(w.matmul(&w).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let cn = cnot_via_conjugation(&controlled_z());
        assert!(cn.matrix.max_abs_diff(&cnot().matrix) < 1e-15);
        assert!(cn.matrix.matmul(&cn.matrix).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        assert_eq!(controlled(&pauli_x(), 2, 0, 1).unwrap().matrix, cnot().matrix);
    }

    #[test]
    fn end_to_end_closed_form_path() {
        let h1 = 0.003;
        let u = rwa_propagator(gate_time(h1).unwrap(), h1, 0.0);
        let cn = cnot_via_conjugation(&controlled_z_from_dynamics(&u, 1e-10).unwrap());
        assert!(cn.matrix.max_abs_diff(&cnot().matrix) < 1e-12);
        assert!((gate_fidelity(&cn, &cnot()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_cnots_match_direct_embedding() {
        for (a, b) in [(0, 1), (1, 2), (0, 2), (1, 0), (2, 1), (2, 0)] {
            let via_two = pairwise_cnot(a, b).unwrap();
            let direct = controlled(&pauli_x(), 3, a, b).unwrap();
            assert!(via_two.matrix.max_abs_diff(&direct.matrix) < 1e-15, "pair ({a}, {b})");
        }
        assert!(pairwise_cnot(1, 1).is_err());
    }

    #[test]
    fn v_squares_to_sigma_x() {
        let v = v_gate().matrix;
        assert!(v.matmul(&v).max_abs_diff(&pauli_x()) < 1e-15);
    }

    #[test]
    fn network_reproduces_ccnot() {
        let net = ccnot_network().unwrap();
        assert!(net.matrix.max_abs_diff(&ccnot().matrix) < 1e-12);
        assert!(net.unitarity_defect() < 1e-12);
    }

    #[test]
    fn network_with_sigma_x_is_not_ccnot() {
        let net = ccnot_network_with(&pauli_x()).unwrap();
        assert!(net.matrix.max_abs_diff(&ccnot().matrix) > 0.5);
    }

    #[test]
    fn fidelity_examples() {
        let id = Gate::new(ComplexMatrix::identity(4), "I").unwrap();
        assert!((gate_fidelity(&id, &id).unwrap() - 1.0).abs() < 1e-15);
        assert!((gate_fidelity(&id, &controlled_z()).unwrap() - 0.5).abs() < 1e-15);
        assert!(gate_fidelity(&id, &walsh()).is_err());
    }

    #[test]
    fn constructors_reject_non_unitary() {
        let m = ComplexMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        assert!(matches!(Gate::new(m, "bad"), Err(Error::NotUnitary { .. })));
    }
}
