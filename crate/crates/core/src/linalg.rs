// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices.
//!
//! Storage is row-major. The comparison norm used throughout the crate is the
//! max-absolute-entry norm ([`ComplexMatrix::max_abs`]).

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Shorthand for a complex literal.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows of real numbers.
    pub fn from_real_rows<const N: usize>(rows: &[[f64; N]]) -> Self {
        Self::from_fn(rows.len(), N, |i, j| c(rows[i][j], 0.0))
    }

    pub fn from_rows<const N: usize>(rows: &[[C64; N]]) -> Self {
        Self::from_fn(rows.len(), N, |i, j| rows[i][j])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Column vector.
    pub fn column(entries: &[C64]) -> Self {
        Self::from_vec(entries.len(), 1, entries.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖A − A†‖∞`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `‖U†U − I‖∞`; for a tall `U` this measures how far it is from an isometry.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.dagger().matmul(self);
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, rhs: &Self) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    /// Square sub-block taken at the given row/column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Kronecker product of a sequence of factors, leftmost first.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    factors.into_iter().fold(ComplexMatrix::identity(1), |acc, f| kron(&acc, f))
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Returns `(λ, V)` with `a = V·diag(λ)·V†`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("hermitian_eig needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let deviation = a.hermiticity_defect();
    if deviation >= 1e-10 {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (a + &a.dagger()).scale_real(0.5);
    let eig = nalgebra::SymmetricEigen::new(sym.to_nalgebra());
    let mut order: Vec<usize> = (0..a.rows).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(a.rows, a.cols, |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential.
///
/// Skew-Hermitian inputs (`A = −iK`, `K` Hermitian) go through the spectral
/// decomposition of `K`, which keeps `exp(−iKt)` unitary to rounding. Every
/// other input uses scaling and squaring with the [13/13] Padé approximant.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("expm needs a square matrix, got {}x{}", a.rows, a.cols)));
    }
    let n = a.rows;
    if n == 0 {
        return Ok(a.clone());
    }
    let skew = (a + &a.dagger()).max_abs();
    if skew <= 1e-14 * a.max_abs().max(1.0) {
        return expm_skew_hermitian(a);
    }
    expm_pade13(a)
}

fn expm_skew_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    // A = −iK with K = iA.
    let k = a.scale(I);
    let (values, v) = hermitian_eig(&k)?;
    let n = a.rows;
    let phases: Vec<C64> = values.iter().map(|&l| C64::from_polar(1.0, -l)).collect();
    let vd = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * phases[j]);
    Ok(vd.matmul(&v.dagger()))
}

fn expm_pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows;
    let norm = a.norm1();
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale_real(0.5f64.powi(s));
    let b = PADE13;
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut m = a6.scale_real(c6);
        m.axpy(c(c4, 0.0), &a4);
        m.axpy(c(c2, 0.0), &a2);
        if c0 != 0.0 {
            m.axpy(c(c0, 0.0), &id);
        }
        m
    };
    let mut u_inner = a6.matmul(&lin(b[13], b[11], b[9], 0.0));
    u_inner = &u_inner + &lin(b[7], b[5], b[3], b[1]);
    let u = a.matmul(&u_inner);
    let mut v = a6.matmul(&lin(b[12], b[10], b[8], 0.0));
    v = &v + &lin(b[6], b[4], b[2], b[0]);

    let p = (&v + &u).to_nalgebra();
    let q = (&v - &u).to_nalgebra();
    let mut r = q
        .lu()
        .solve(&p)
        .map(|m| ComplexMatrix::from_nalgebra(&m))
        .ok_or_else(|| Error::Dimension("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut impl Rng, n: usize, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
        let m = random_matrix(rng, n, 1.0);
        (&m + &m.dagger()).scale_real(0.5)
    }

    fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])
    }

    // Taylor series with squaring; independent of both expm paths.
    fn taylor_expm(a: &ComplexMatrix, terms: usize) -> ComplexMatrix {
        let mut s = 0;
        let mut scaled = a.clone();
        while scaled.norm1() >= 0.5 {
            scaled = scaled.scale_real(0.5);
            s += 1;
        }
        let mut sum = ComplexMatrix::identity(a.rows());
        let mut term = ComplexMatrix::identity(a.rows());
        for k in 1..terms {
            term = term.matmul(&scaled).scale_real(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..s {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_sigma_plus_sigma_minus_single_entry() {
        let sp = sigma_plus();
        let sm = sp.dagger();
        let k = kron(&sp, &sm);
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(1, 2)] = ONE;
        assert_eq!(k, expected);
    }

    proptest! {
        #[test]
        fn kron_matches_entrywise_definition(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, 2, 1.0);
            let b = random_matrix(&mut rng, 2, 1.0);
            let k = kron(&a, &b);
            for i in 0..2 { for j in 0..2 { for p in 0..2 { for q in 0..2 {
                prop_assert_eq!(k[(2 * i + p, 2 * j + q)], a[(i, j)] * b[(p, q)]);
            }}}}
        }

        #[test]
        fn dagger_is_an_involution(seed in any::<u64>(), n in 1usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, 1.0);
            prop_assert_eq!(dagger(&dagger(&a)), a);
        }

        #[test]
        fn expm_of_hermitian_generator_is_unitary(seed in any::<u64>(), n in 1usize..12) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(&mut rng, n);
            let fwd = expm(&h.scale(-I)).unwrap();
            let back = expm(&h.scale(I)).unwrap();
            prop_assert!(fwd.matmul(&back).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn dagger_identity() {
        assert_eq!(dagger(&ComplexMatrix::identity(3)), ComplexMatrix::identity(3));
    }

    #[test]
    fn expm_zero_and_diagonal() {
        let z = ComplexMatrix::zeros(3, 3);
        assert!(expm(&z).unwrap().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        let d = ComplexMatrix::from_diag(&[c(0.0, std::f64::consts::PI), ZERO]);
        let e = expm(&d).unwrap();
        let expected = ComplexMatrix::from_diag(&[c(-1.0, 0.0), ONE]);
        assert!(e.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn expm_rejects_non_square() {
        assert!(matches!(expm(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn expm_matches_taylor_oracle_on_general_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 8, 0.06);
            assert!(a.norm1() < 0.5);
            let pade = expm(&a).unwrap();
            let taylor = taylor_expm(&a, 50);
            assert!(pade.max_abs_diff(&taylor) < 1e-12, "{}", pade.max_abs_diff(&taylor));
        }
        // Larger norms exercise the squaring phase.
        for _ in 0..5 {
            let a = random_matrix(&mut rng, 8, 2.0);
            let pade = expm(&a).unwrap();
            let taylor = taylor_expm(&a, 50);
            let rel = pade.max_abs_diff(&taylor) / taylor.max_abs();
            assert!(rel < 1e-11, "{rel}");
        }
    }

    #[test]
    fn expm_skew_hermitian_path_agrees_with_pade() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 10);
        let a = h.scale(-I);
        let spectral = expm(&a).unwrap();
        let pade = expm_pade13(&a).unwrap();
        assert!(spectral.max_abs_diff(&pade) < 1e-12);
    }

    #[test]
    fn hermitian_eig_small_cases() {
        let (l, _) = hermitian_eig(&ComplexMatrix::identity(2)).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-15 && (l[1] - 1.0).abs() < 1e-15);
        let sx = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]);
        let (l, _) = hermitian_eig(&sx).unwrap();
        assert!((l[0] + 1.0).abs() < 1e-15 && (l[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_eig_rejects_non_hermitian() {
        assert!(matches!(hermitian_eig(&sigma_plus()), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 2, 5, 17, 40, 64] {
            let a = random_hermitian(&mut rng, n);
            let (l, v) = hermitian_eig(&a).unwrap();
            assert!(l.windows(2).all(|w| w[0] <= w[1]));
            assert!(v.unitarity_defect() < 1e-12);
            let diag = ComplexMatrix::from_diag(&l.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let rec = v.matmul(&diag).matmul(&v.dagger());
            assert!(rec.max_abs_diff(&a) < 1e-11, "n={n}: {}", rec.max_abs_diff(&a));
        }
    }
}
