// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

//! Ground-sector reduction and rotating-wave approximation.
//!
//! Restricting `F(t)` to the ansatz `(a₊₊, a₊₋, a₋₊, a₋₋) ⊗ |0⟩` gives a 4×4
//! system whose coefficients are products of `f(0), f(1), k(0), k(1)` and the
//! drive phases. Expanding every sine and cosine into exponentials turns each
//! coefficient into a [`TrigPoly`] over exact integer frequency keys, so
//! selecting the non-oscillating part under a resonance condition is an exact
//! symbolic operation.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, C64, I, ONE, ZERO};
use crate::model::{DriveTone, ModelParams};

/// Frequency `(p√2 + q√6)g + d1(Ω₁+ω) + d2(Ω₂+ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FreqKey {
    pub p: i32,
    pub q: i32,
    pub d1: i32,
    pub d2: i32,
}

impl FreqKey {
    pub const DC: FreqKey = FreqKey::new(0, 0, 0, 0);

    pub const fn new(p: i32, q: i32, d1: i32, d2: i32) -> Self {
        Self { p, q, d1, d2 }
    }

    fn as_array(self) -> [i64; 4] {
        [self.p as i64, self.q as i64, self.d1 as i64, self.d2 as i64]
    }

    pub fn is_dc(self) -> bool {
        self == Self::DC
    }

    /// True when `self` is a rational multiple of `other` (including zero).
    pub fn is_parallel_to(self, other: FreqKey) -> bool {
        let a = self.as_array();
        let b = other.as_array();
        (0..4).all(|i| (0..4).all(|j| a[i] * b[j] == a[j] * b[i]))
    }

    pub fn frequency(self, ctx: &FrequencyContext) -> f64 {
        (self.p as f64 * 2f64.sqrt() + self.q as f64 * 6f64.sqrt()) * ctx.g
            + self.d1 as f64 * ctx.shift1
            + self.d2 as f64 * ctx.shift2
    }
}

impl Add for FreqKey {
    type Output = FreqKey;
    fn add(self, o: FreqKey) -> FreqKey {
        FreqKey::new(self.p + o.p, self.q + o.q, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Neg for FreqKey {
    type Output = FreqKey;
    fn neg(self) -> FreqKey {
        FreqKey::new(-self.p, -self.q, -self.d1, -self.d2)
    }
}

impl fmt::Display for FreqKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(p={}, q={}, d1={}, d2={})", self.p, self.q, self.d1, self.d2)
    }
}

/// Numerical values behind the symbolic frequency basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyContext {
    pub g: f64,
    /// `Ω₁ + ω`
    pub shift1: f64,
    /// `Ω₂ + ω`
    pub shift2: f64,
}

impl FrequencyContext {
    pub fn from_params(params: &ModelParams) -> Self {
        Self {
            g: params.g,
            shift1: params.drives[0].frequency + params.omega,
            shift2: params.drives[1].frequency + params.omega,
        }
    }
}

/// Finite sum `Σ c_k e^{i ν_k t}` with symbolic frequencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    terms: BTreeMap<FreqKey, C64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(z: C64) -> Self {
        Self::exp(FreqKey::DC, z)
    }

    pub fn real(x: f64) -> Self {
        Self::constant(c(x, 0.0))
    }

    /// `amp · e^{i ν_key t}`.
    pub fn exp(key: FreqKey, amp: C64) -> Self {
        let mut p = Self::zero();
        p.add_term(key, amp);
        p
    }

    /// `cos(ν_key t)`.
    pub fn cos(key: FreqKey) -> Self {
        &Self::exp(key, c(0.5, 0.0)) + &Self::exp(-key, c(0.5, 0.0))
    }

    /// `sin(ν_key t)`.
    pub fn sin(key: FreqKey) -> Self {
        // (e^{iθ} − e^{−iθ}) / 2i
        &Self::exp(key, c(0.0, -0.5)) + &Self::exp(-key, c(0.0, 0.5))
    }

    fn add_term(&mut self, key: FreqKey, amp: C64) {
        let slot = self.terms.entry(key).or_insert(ZERO);
        *slot += amp;
        if *slot == ZERO {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreqKey, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, key: FreqKey) -> C64 {
        self.terms.get(&key).copied().unwrap_or(ZERO)
    }

    pub fn scale(&self, z: C64) -> Self {
        let mut out = Self::zero();
        for (k, a) in &self.terms {
            out.add_term(*k, a * z);
        }
        out
    }

    pub fn scale_real(&self, x: f64) -> Self {
        self.scale(c(x, 0.0))
    }

    /// Complex conjugate as a function of real `t`.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero();
        for (k, a) in &self.terms {
            out.add_term(-*k, a.conj());
        }
        out
    }

    /// Largest amplitude difference between two polynomials.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for (k, a) in &self.terms {
            worst = worst.max((a - other.amplitude(*k)).norm());
        }
        for (k, b) in &other.terms {
            if !self.terms.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }

    /// Whether the polynomial is real-valued: `c(−k) = conj(c(k))` within `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.conj()) <= tol
    }

    pub fn eval(&self, t: f64, ctx: &FrequencyContext) -> C64 {
        self.terms.iter().map(|(k, a)| a * C64::from_polar(1.0, k.frequency(ctx) * t)).sum()
    }

    /// Sum of amplitudes on keys that are zero frequency under the resonance `key`.
    pub fn resonant_part(&self, resonance: FreqKey) -> C64 {
        self.terms.iter().filter(|(k, _)| k.is_parallel_to(resonance)).map(|(_, a)| *a).sum()
    }

    fn touches(&self, resonance: FreqKey) -> bool {
        self.terms.iter().any(|(k, a)| !k.is_dc() && k.is_parallel_to(resonance) && *a != ZERO)
    }
}

impl<'a> Add<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (k, a) in &rhs.terms {
            out.add_term(*k, *a);
        }
        out
    }
}

impl<'a> Mul<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &rhs.terms {
                out.add_term(*ka + *kb, a * b);
            }
        }
        out
    }
}

/// Frequency key of the `m`-photon exchange frequency `√(2(2m+1)) g`.
fn sector_key(m: usize) -> FreqKey {
    match m {
        0 => FreqKey::new(1, 0, 0, 0),
        1 => FreqKey::new(0, 1, 0, 0),
        _ => unreachable!("only the m = 0, 1 sectors enter the ground-sector system"),
    }
}

/// `f(m) = (−1 + cos(tg√(2(2m+1))))/2` as a trig polynomial, `m ∈ {0, 1}`.
pub fn f_poly(m: usize) -> TrigPoly {
    &TrigPoly::real(-0.5) + &TrigPoly::cos(sector_key(m)).scale_real(0.5)
}

/// `k(m) = sin(tg√(2(2m+1)))/√(2(2m+1))`, `m ∈ {0, 1}`.
pub fn k_poly(m: usize) -> TrigPoly {
    TrigPoly::sin(sector_key(m)).scale_real(1.0 / crate::closed_form::sector_frequency(m))
}

/// The four coefficient profiles of the ground-sector system.
#[derive(Debug, Clone)]
pub struct Profiles {
    /// `f(0) + ⅔f(0)f(1) + k(0)k(1)`
    pub cross: TrigPoly,
    /// `1 + f(0) + ⅔f(1) + ⅔f(0)f(1) + k(0)k(1)`
    pub direct: TrigPoly,
    /// `1 + f(0)`
    pub lower_direct: TrigPoly,
    /// `f(0)`
    pub lower_cross: TrigPoly,
}

impl Profiles {
    pub fn new() -> Self {
        let (f0, f1, k0, k1) = (f_poly(0), f_poly(1), k_poly(0), k_poly(1));
        let f0f1 = &f0 * &f1;
        let k0k1 = &k0 * &k1;
        let tail = &f0f1.scale_real(2.0 / 3.0) + &k0k1;
        let cross = &f0 + &tail;
        let direct = &(&TrigPoly::real(1.0) + &f0) + &(&f1.scale_real(2.0 / 3.0) + &tail);
        let lower_direct = &TrigPoly::real(1.0) + &f0;
        Self { cross, direct, lower_direct, lower_cross: f0 }
    }
}

impl Default for Profiles {
    fn default() -> Self {
        Self::new()
    }
}

/// Time-dependent 4×4 ground-sector coefficient matrix.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub entries: [[TrigPoly; 4]; 4],
    pub context: FrequencyContext,
}

impl ReducedSystem {
    pub fn eval(&self, t: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(4, 4, |i, j| self.entries[i][j].eval(t, &self.context))
    }

    /// Entry `(i, j)` equals `conj(entry (j, i))` as a trig-polynomial identity.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max(self.entries[i][j].max_abs_diff(&self.entries[j][i].conj()));
            }
        }
        worst
    }

    /// Positions whose polynomial is identically zero.
    pub fn zero_pattern(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if self.entries[i][j].is_empty() {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Drive tone `h e^{±i((Ω+ω)t+φ)}` as a trig polynomial.
fn tone(d: &DriveTone, which: usize, sign: i32) -> TrigPoly {
    let key = if which == 0 { FreqKey::new(0, 0, sign, 0) } else { FreqKey::new(0, 0, 0, sign) };
    TrigPoly::exp(key, C64::from_polar(d.h, sign as f64 * d.phi))
}

/// Expands the ground-sector equations into exact trig polynomials.
pub fn build_reduced_system(params: &ModelParams) -> Result<ReducedSystem> {
    params.require_two_atoms()?;
    params.validate()?;
    let pr = Profiles::new();
    let (d1, d2) = (&params.drives[0], &params.drives[1]);
    let up1 = tone(d1, 0, 1);
    let up2 = tone(d2, 1, 1);
    let dn1 = tone(d1, 0, -1);
    let dn2 = tone(d2, 1, -1);
    let term = |a: &TrigPoly, pa: &TrigPoly, b: &TrigPoly, pb: &TrigPoly| &(a * pa) + &(b * pb);
    let z = TrigPoly::zero;

    let entries = [
        [z(), term(&up1, &pr.cross, &up2, &pr.direct), term(&up1, &pr.direct, &up2, &pr.cross), z()],
        [
            term(&dn1, &pr.cross, &dn2, &pr.direct),
            z(),
            z(),
            term(&up1, &pr.lower_direct, &up2, &pr.lower_cross),
        ],
        [
            term(&dn1, &pr.direct, &dn2, &pr.cross),
            z(),
            z(),
            term(&up1, &pr.lower_cross, &up2, &pr.lower_direct),
        ],
        [
            z(),
            term(&dn1, &pr.lower_direct, &dn2, &pr.lower_cross),
            term(&dn1, &pr.lower_cross, &dn2, &pr.lower_direct),
            z(),
        ],
    ];
    Ok(ReducedSystem { entries, context: FrequencyContext::from_params(params) })
}

/// Resonance `Ω₁ + ω − (√2 + √6)g = 0`.
pub const DEFAULT_RESONANCE: FreqKey = FreqKey::new(-1, -1, 1, 0);

/// Drive frequency Ω₁ making `resonance` a zero frequency.
pub fn solve_resonance_for(params: &ModelParams, resonance: FreqKey) -> Result<f64> {
    if resonance.d1 == 0 {
        return Err(Error::InvalidParams(format!("resonance {resonance} does not involve drive 1")));
    }
    let fixed = (resonance.p as f64 * 2f64.sqrt() + resonance.q as f64 * 6f64.sqrt()) * params.g
        + resonance.d2 as f64 * (params.drives.get(1).map_or(0.0, |d| d.frequency) + params.omega);
    Ok(-fixed / resonance.d1 as f64 - params.omega)
}

/// `Ω₁ = (√2 + √6)g − ω`.
pub fn solve_resonance(params: &ModelParams) -> f64 {
    solve_resonance_for(params, DEFAULT_RESONANCE).expect("default resonance involves drive 1")
}

/// Constant Hamiltonian left after discarding every oscillating term.
pub fn rwa_hamiltonian(sys: &ReducedSystem, resonance: FreqKey) -> Result<ComplexMatrix> {
    let present = sys.entries.iter().flatten().any(|p| p.touches(resonance));
    if !present {
        return Err(Error::NoResonance(resonance.to_string()));
    }
    Ok(ComplexMatrix::from_fn(4, 4, |i, j| sys.entries[i][j].resonant_part(resonance)))
}

/// `α = (√6 − √2) h₁ / 24`.
pub fn rwa_alpha(h1: f64) -> f64 {
    (6f64.sqrt() - 2f64.sqrt()) / 24.0 * h1
}

/// Closed-form `exp(−itH_RWA)` for the default resonance.
pub fn rwa_propagator(t: f64, h1: f64, phi1: f64) -> ComplexMatrix {
    let (s, co) = (rwa_alpha(h1) * t).sin_cos();
    let up = I * C64::from_polar(1.0, phi1) * (s / 2f64.sqrt());
    let dn = I * C64::from_polar(1.0, -phi1) * (s / 2f64.sqrt());
    let p = c((1.0 + co) / 2.0, 0.0);
    let m = c((-1.0 + co) / 2.0, 0.0);
    ComplexMatrix::from_rows(&[
        [c(co, 0.0), up, up, ZERO],
        [dn, p, m, ZERO],
        [dn, m, p, ZERO],
        [ZERO, ZERO, ZERO, ONE],
    ])
}

/// Smallest `t₀ > 0` with `cos(αt₀) = −1`.
pub fn gate_time(h1: f64) -> Result<f64> {
    if !(h1 > 0.0 && h1.is_finite()) {
        return Err(Error::NoGate(format!("h1 must be positive, got {h1}")));
    }
    Ok(PI / rwa_alpha(h1))
}

/// Two-atom parameters used for gate runs: `g = ω = Δ = 1`, one resonant tone.
pub fn gate_params(h1: f64) -> ModelParams {
    let mut p = ModelParams::undriven(2);
    p.drives[0] = DriveTone { h: h1, frequency: 0.0, phi: 0.0 };
    p.drives[0].frequency = solve_resonance(&p);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::FkFunctions;
    use crate::linalg::{expm, hermitian_eig};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_params(rng: &mut impl Rng) -> ModelParams {
        let w = rng.gen_range(0.5..2.0);
        ModelParams {
            n_atoms: 2,
            omega: w,
            delta: w,
            g: rng.gen_range(0.3..1.5),
            drives: (0..2)
                .map(|_| DriveTone {
                    h: rng.gen_range(0.0..1.0),
                    frequency: rng.gen_range(-3.0..3.0),
                    phi: rng.gen_range(0.0..6.3),
                })
                .collect(),
        }
    }

    fn key_strategy() -> impl Strategy<Value = FreqKey> {
        (-2i32..=2, -2i32..=2, -1i32..=1, -1i32..=1).prop_map(|(p, q, a, b)| FreqKey::new(p, q, a, b))
    }

    fn poly_strategy() -> impl Strategy<Value = TrigPoly> {
        prop::collection::vec((key_strategy(), -1.0f64..1.0, -1.0f64..1.0), 0..5).prop_map(|terms| {
            terms.into_iter().fold(TrigPoly::zero(), |acc, (k, re, im)| &acc + &TrigPoly::exp(k, c(re, im)))
        })
    }

    proptest! {
        #[test]
        fn products_evaluate_pointwise(a in poly_strategy(), b in poly_strategy(), t in -20.0f64..20.0) {
            let ctx = FrequencyContext { g: 0.8, shift1: 1.3, shift2: -0.4 };
            let lhs = (&a * &b).eval(t, &ctx);
            let rhs = a.eval(t, &ctx) * b.eval(t, &ctx);
            prop_assert!((lhs - rhs).norm() < 1e-12);
            let sum = (&a + &b).eval(t, &ctx);
            prop_assert!((sum - a.eval(t, &ctx) - b.eval(t, &ctx)).norm() < 1e-12);
            prop_assert!((a.conj().eval(t, &ctx) - a.eval(t, &ctx).conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn profiles_match_tabulated_functions() {
        let pr = Profiles::new();
        let ctx = FrequencyContext { g: 0.9, shift1: 0.0, shift2: 0.0 };
        for &t in &[0.0, 0.37, 5.1, 40.0] {
            let fk = FkFunctions::new(t, 0.9, 2);
            let (f0, f1, k0, k1) = (fk.f(0), fk.f(1), fk.k(0), fk.k(1));
            let expect = [
                (&pr.cross, f0 + 2.0 / 3.0 * f0 * f1 + k0 * k1),
                (&pr.direct, 1.0 + f0 + 2.0 / 3.0 * f1 + 2.0 / 3.0 * f0 * f1 + k0 * k1),
                (&pr.lower_direct, 1.0 + f0),
                (&pr.lower_cross, f0),
            ];
            for (p, v) in expect {
                assert!((p.eval(t, &ctx) - c(v, 0.0)).norm() < 1e-14);
                assert!(p.is_real(1e-16));
            }
        }
        // Value at t = 0: f = k = 0.
        let ctx0 = FrequencyContext { g: 1.0, shift1: 0.0, shift2: 0.0 };
        assert!((pr.cross.eval(0.0, &ctx0)).norm() < 1e-15);
        assert!((pr.direct.eval(0.0, &ctx0) - ONE).norm() < 1e-15);
        assert!((pr.lower_direct.eval(0.0, &ctx0) - ONE).norm() < 1e-15);
        assert!((pr.lower_cross.eval(0.0, &ctx0)).norm() < 1e-15);
    }

    #[test]
    fn dc_content_of_cross_profile() {
        // f(0) → −½, ⅔f(0)f(1) → ⅔·¼, k(0)k(1) → 0.
        let dc = Profiles::new().cross.amplitude(FreqKey::DC);
        assert!((dc - c(-1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reduced_entry_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let p = random_params(&mut rng);
        let sys = build_reduced_system(&p).unwrap();
        let d = p.drives[0];
        for _ in 0..50 {
            let t = rng.gen_range(0.0..100.0);
            let fk = FkFunctions::new(t, p.g, 2);
            let (f0, f1, k0, k1) = (fk.f(0), fk.f(1), fk.k(0), fk.k(1));
            let direct = 1.0 + f0 + 2.0 / 3.0 * f1 + 2.0 / 3.0 * f0 * f1 + k0 * k1;
            let cross = f0 + 2.0 / 3.0 * f0 * f1 + k0 * k1;
            let e1 = C64::from_polar(d.h, (d.frequency + p.omega) * t + d.phi);
            let d2 = p.drives[1];
            let e2 = C64::from_polar(d2.h, (d2.frequency + p.omega) * t + d2.phi);
            let expected = e1 * direct + e2 * cross;
            assert!((sys.entries[0][2].eval(t, &sys.context) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_system_is_ground_block_of_frame_generator() {
        use crate::frame::{appendix_action, FrameGenerator};
        use crate::model::HilbertLayout;
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let layout = HilbertLayout::new(2, 6).unwrap();
        for _ in 0..10 {
            let p = random_params(&mut rng);
            let sys = build_reduced_system(&p).unwrap();
            let gen = FrameGenerator::new(&p, &layout).unwrap();
            let t = rng.gen_range(0.0..60.0);
            let reduced = sys.eval(t);
            assert!(gen.evaluate(t).atomic_block(0, 0).max_abs_diff(&reduced) < 1e-12);
            let amps: [C64; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let full = appendix_action(&p, &layout, t, amps).unwrap();
            for a in 0..4 {
                let expect: C64 = (0..4).map(|b| reduced[(a, b)] * amps[b]).sum();
                assert!((full[layout.index(a, 0)] - expect).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduced_system_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let sys = build_reduced_system(&random_params(&mut rng)).unwrap();
        let zeros = sys.zero_pattern();
        let expected = vec![(0, 0), (0, 3), (1, 1), (1, 2), (2, 1), (2, 2), (3, 0), (3, 3)];
        assert_eq!(zeros, expected);
        assert!(sys.hermiticity_defect() < 1e-16);
        assert!(build_reduced_system(&ModelParams::undriven(3)).is_err());
    }

    #[test]
    fn resonance_solution() {
        let p = ModelParams::undriven(2);
        let w1 = solve_resonance(&p);
        assert!((w1 - (2f64.sqrt() + 6f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!((w1 - 2.863703305156273).abs() < 1e-12);
        let p = ModelParams { omega: 2f64.sqrt() + 6f64.sqrt(), delta: 2f64.sqrt() + 6f64.sqrt(), ..p };
        assert!(solve_resonance(&p).abs() < 1e-15);

        let p = gate_params(0.01);
        let ctx = FrequencyContext::from_params(&p);
        assert!(DEFAULT_RESONANCE.frequency(&ctx).abs() < 1e-15);
    }

    #[test]
    fn rwa_hamiltonian_coefficient_and_pattern() {
        let h1 = 1.0;
        let phi = 0.7;
        let mut p = gate_params(h1);
        p.drives[0].phi = phi;
        p.drives[1] = DriveTone { h: 0.3, frequency: 0.9, phi: 0.2 };
        let sys = build_reduced_system(&p).unwrap();
        let h = rwa_hamiltonian(&sys, DEFAULT_RESONANCE).unwrap();
        let coef = -(3f64.sqrt() - 1.0) * h1 / 24.0;
        assert!((coef - -0.030502116982036).abs() < 1e-14);
        let mut expected = ComplexMatrix::zeros(4, 4);
        let up = C64::from_polar(coef, phi);
        expected[(0, 1)] = up;
        expected[(0, 2)] = up;
        expected[(1, 0)] = up.conj();
        expected[(2, 0)] = up.conj();
        assert!(h.max_abs_diff(&expected) < 1e-14);
        for (i, j) in [(0, 3), (1, 2), (2, 1), (1, 3), (2, 3), (3, 0), (3, 1), (3, 2), (3, 3)] {
            assert_eq!(h[(i, j)], ZERO);
        }
    }

    #[test]
    fn resonant_amplitude_of_products() {
        // ⅔·(1/4)(1/4) + (−1/(2i√2))(−1/(2i√6)) = (1 − √3)/24
        let pr = Profiles::new();
        let key = FreqKey::new(-1, -1, 0, 0);
        let tail = &pr.cross + &pr.lower_cross.scale_real(-1.0);
        let expected = (1.0 - 3f64.sqrt()) / 24.0;
        assert!((tail.amplitude(key) - c(expected, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn missing_resonance_is_an_error() {
        let sys = build_reduced_system(&gate_params(0.1)).unwrap();
        // √10 never appears in the ground-sector profiles: use a key with p = 3.
        let r = rwa_hamiltonian(&sys, FreqKey::new(3, 0, 1, 0));
        assert!(matches!(r, Err(Error::NoResonance(_))));
    }

    #[test]
    fn alternative_resonance_is_supported() {
        // Ω₁ + ω = √2 g picks up the f(0) and k(0)k(1)-free parts.
        let mut p = gate_params(0.2);
        let key = FreqKey::new(-1, 0, 1, 0);
        p.drives[0].frequency = solve_resonance_for(&p, key).unwrap();
        let sys = build_reduced_system(&p).unwrap();
        let h = rwa_hamiltonian(&sys, key).unwrap();
        assert!(h.hermiticity_defect() < 1e-15);
        assert!(h.max_abs() > 0.0);
    }

    #[test]
    fn rwa_spectrum_gives_alpha() {
        let h1 = 0.37;
        let sys = build_reduced_system(&gate_params(h1)).unwrap();
        let h = rwa_hamiltonian(&sys, DEFAULT_RESONANCE).unwrap();
        let (ev, _) = hermitian_eig(&h).unwrap();
        let a = 2f64.sqrt() * (3f64.sqrt() - 1.0) * h1 / 24.0;
        let expected = [-a, 0.0, 0.0, a];
        for (x, y) in ev.iter().zip(expected) {
            assert!((x - y).abs() < 1e-13);
        }
        assert!((ev[3] - rwa_alpha(h1)).abs() < 1e-13);
    }

    #[test]
    fn rwa_propagator_closed_form() {
        assert!(rwa_propagator(0.0, 0.3, 1.1).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-16);
        let h1 = 0.02;
        let t0 = gate_time(h1).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[
            [-1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        assert!(rwa_propagator(t0, h1, 0.4).max_abs_diff(&expected) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..10 {
            let h1 = rng.gen_range(0.001..1.0);
            let phi = rng.gen_range(0.0..6.3);
            let t = rng.gen_range(0.0..2.0 * t0);
            let mut p = gate_params(h1);
            p.drives[0].phi = phi;
            let h = rwa_hamiltonian(&build_reduced_system(&p).unwrap(), DEFAULT_RESONANCE).unwrap();
            let numeric = expm(&h.scale(c(0.0, -t))).unwrap();
            assert!(numeric.max_abs_diff(&rwa_propagator(t, h1, phi)) < 1e-12);
        }
    }

    #[test]
    fn gate_time_values() {
        let t0 = gate_time(0.01).unwrap();
        assert!((t0 - 2400.0 * PI / (6f64.sqrt() - 2f64.sqrt())).abs() < 1e-9);
        assert!((t0 - 7282.909151).abs() < 1e-5);
        let a = rwa_alpha(0.01) * t0;
        assert!(a.sin().abs() < 1e-12 && (a.cos() + 1.0).abs() < 1e-12);
        assert!((gate_time(0.02).unwrap() - t0 / 2.0).abs() < 1e-9);
        assert!(matches!(gate_time(0.0), Err(Error::NoGate(_))));
    }

    #[test]
    fn phase_enters_by_diagonal_conjugation() {
        let h1 = 0.05;
        let t = 123.4;
        let base = rwa_propagator(t, h1, 0.0);
        for phi in [0.0, PI / 3.0, PI] {
            let u = rwa_propagator(t, h1, phi);
            let e = C64::from_polar(1.0, -phi);
            let d = ComplexMatrix::from_diag(&[ONE, e, e, ONE]);
            assert!(d.matmul(&base).matmul(&d.dagger()).max_abs_diff(&u) < 1e-15);
            let t0 = gate_time(h1).unwrap();
            assert!(rwa_propagator(t0, h1, phi).max_abs_diff(&rwa_propagator(t0, h1, 0.0)) < 1e-12);
        }
    }
}
