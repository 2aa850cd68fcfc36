// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! State vectors, the control-operator families of the annealer, analytic
//! Pauli rotations and a dense matrix-exponential oracle.
//!
//! Basis convention: qubit `q` is bit `q` of the basis index, so qubit 0 is
//! the least significant bit. `|01⟩` in ket notation written most-significant
//! first is index 1 (qubit 0 set).
//!
//! Units: ħ = 1 and every Hamiltonian is dimensionless.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{cplx, Scalar, C};

/// Largest supported register size.
pub const MAX_QUBITS: usize = 12;

/// Number of control Hamiltonians for `n` qubits: `n` X terms, `n` Z terms
/// and `n(n-1)/2` ZZ couplings.
pub const fn term_count(n: usize) -> usize {
    n * (n + 3) / 2
}

/// Pure state of an `n`-qubit register.
#[derive(Clone, PartialEq)]
pub struct StateVector<T: Scalar> {
    n: usize,
    amps: Vec<C<T>>,
}

impl<T: Scalar> fmt::Debug for StateVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateVector")
            .field("n", &self.n)
            .field("amps", &self.amps)
            .finish()
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidQubitCount(n));
    }
    Ok(())
}

impl<T: Scalar> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::DimensionMismatch(index, dim));
        }
        let mut amps = vec![C::new(T::zero(), T::zero()); dim];
        amps[index] = C::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// Wraps raw amplitudes; the caller decides whether they are normalized.
    pub fn from_amps(n: usize, amps: Vec<C<T>>) -> Result<Self> {
        check_qubits(n)?;
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch {
                what: "state amplitudes",
                expected: 1 << n,
                got: amps.len(),
            });
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > T::zero() {
            let inv = T::one() / norm;
            for a in &mut self.amps {
                *a = a.scale(inv);
            }
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// Largest modulus of the amplitude-wise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Multiplies every amplitude by `e^{iφ}`.
    pub fn with_global_phase(mut self, phi: T) -> Self {
        let p = C::from_polar(T::one(), phi);
        for a in &mut self.amps {
            *a *= p;
        }
        self
    }
}

/// `Σ conj(a_b) b_b`.
#[inline]
pub fn inner<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// One control Hamiltonian `H_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ControlTerm {
    /// σx on one qubit.
    X(usize),
    /// σz on one qubit.
    Z(usize),
    /// σz ⊗ σz on a pair `q1 < q2`.
    ZZ(usize, usize),
}

impl ControlTerm {
    /// Maps a term index to its operator: `[0,n)` are X terms, `[n,2n)` Z
    /// terms, the rest ZZ pairs in lexicographic order.
    pub fn from_index(i: usize, n: usize) -> Result<Self> {
        let m = term_count(n);
        if i >= m {
            return Err(Error::QubitOutOfRange { index: i, n });
        }
        if i < n {
            return Ok(ControlTerm::X(i));
        }
        if i < 2 * n {
            return Ok(ControlTerm::Z(i - n));
        }
        let mut k = i - 2 * n;
        for q1 in 0..n {
            let row = n - q1 - 1;
            if k < row {
                return Ok(ControlTerm::ZZ(q1, q1 + 1 + k));
            }
            k -= row;
        }
        unreachable!("index below term_count always maps to a pair")
    }

    /// Inverse of [`ControlTerm::from_index`].
    pub fn index(&self, n: usize) -> usize {
        match *self {
            ControlTerm::X(q) => q,
            ControlTerm::Z(q) => n + q,
            ControlTerm::ZZ(q1, q2) => {
                // pairs before row q1, then offset within the row
                let before = q1 * n - q1 * (q1 + 1) / 2;
                2 * n + before + (q2 - q1 - 1)
            }
        }
    }

    /// All `term_count(n)` terms in index order.
    pub fn all(n: usize) -> Vec<ControlTerm> {
        (0..term_count(n))
            .map(|i| ControlTerm::from_index(i, n).expect("index in range"))
            .collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let check = |q: usize| {
            if q >= n {
                Err(Error::QubitOutOfRange { index: q, n })
            } else {
                Ok(())
            }
        };
        match *self {
            ControlTerm::X(q) | ControlTerm::Z(q) => check(q),
            ControlTerm::ZZ(q1, q2) => {
                check(q1)?;
                check(q2)?;
                if q1 >= q2 {
                    return Err(Error::QubitOutOfRange { index: q1, n });
                }
                Ok(())
            }
        }
    }

    /// True for operators diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        !matches!(self, ControlTerm::X(_))
    }

    /// Eigenvalue (±1) of a diagonal term on basis state `b`.
    #[inline]
    fn sign(&self, b: usize) -> bool {
        match *self {
            ControlTerm::X(_) => unreachable!("X is not diagonal"),
            ControlTerm::Z(q) => (b >> q) & 1 == 1,
            ControlTerm::ZZ(q1, q2) => ((b >> q1) ^ (b >> q2)) & 1 == 1,
        }
    }
}

impl fmt::Display for ControlTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ControlTerm::X(q) => write!(f, "X{q}"),
            ControlTerm::Z(q) => write!(f, "Z{q}"),
            ControlTerm::ZZ(a, b) => write!(f, "Z{a}Z{b}"),
        }
    }
}

/// `H_i|ψ⟩` into `out`. No bounds checks on the term.
pub fn apply_term_into<T: Scalar>(amps: &[C<T>], term: ControlTerm, out: &mut [C<T>]) {
    match term {
        ControlTerm::X(q) => {
            let mask = 1usize << q;
            for (b, o) in out.iter_mut().enumerate() {
                *o = amps[b ^ mask];
            }
        }
        _ => {
            for (b, (o, a)) in out.iter_mut().zip(amps).enumerate() {
                *o = if term.sign(b) { -a } else { *a };
            }
        }
    }
}

/// Applies `H_i` to `state`. The result is unnormalized in general (it is
/// not for these involutory terms, but callers should not rely on that).
pub fn apply_term<T: Scalar>(state: &StateVector<T>, term: ControlTerm) -> Result<StateVector<T>> {
    term.validate(state.n)?;
    let mut out = state.amps.clone();
    apply_term_into(&state.amps, term, &mut out);
    Ok(StateVector { n: state.n, amps: out })
}

/// In-place `e^{-iθ H}` for an involutory term: `cos θ − i sin θ H`.
/// O(2^n), no allocation, no bounds checks on the term.
pub fn rotate_in_place<T: Scalar>(amps: &mut [C<T>], term: ControlTerm, theta: T) {
    let (s, c) = theta.sin_cos();
    match term {
        ControlTerm::X(q) => {
            let mask = 1usize << q;
            let dim = amps.len();
            let mut hi = 0;
            while hi < dim {
                for b in hi..hi + mask {
                    let a0 = amps[b];
                    let a1 = amps[b + mask];
                    // −i s a = (s·a.im, −s·a.re)
                    amps[b] = cplx(c * a0.re + s * a1.im, c * a0.im - s * a1.re);
                    amps[b + mask] = cplx(c * a1.re + s * a0.im, c * a1.im - s * a0.re);
                }
                hi += 2 * mask;
            }
        }
        _ => {
            let minus = cplx(c, -s); // eigenvalue +1
            let plus = cplx(c, s); // eigenvalue −1
            for (b, a) in amps.iter_mut().enumerate() {
                *a *= if term.sign(b) { plus } else { minus };
            }
        }
    }
}

/// `e^{-iθ H_i}|ψ⟩` by the closed form `cos θ |ψ⟩ − i sin θ H_i|ψ⟩`.
pub fn pauli_rotation<T: Scalar>(
    state: &StateVector<T>,
    term: ControlTerm,
    theta: T,
) -> Result<StateVector<T>> {
    term.validate(state.n)?;
    let mut out = state.clone();
    rotate_in_place(&mut out.amps, term, theta);
    Ok(out)
}

/// `Im ⟨g| H |ψ⟩`: derivative of `Re⟨g, e^{-iθH}ψ_in⟩` with respect to θ
/// evaluated at the rotation output `ψ`.
#[inline]
pub(crate) fn im_inner_term<T: Scalar>(g: &[C<T>], psi: &[C<T>], term: ControlTerm) -> T {
    let mut acc = T::zero();
    match term {
        ControlTerm::X(q) => {
            let mask = 1usize << q;
            for (b, gb) in g.iter().enumerate() {
                let h = psi[b ^ mask];
                acc += gb.re * h.im - gb.im * h.re;
            }
        }
        _ => {
            for (b, (gb, h)) in g.iter().zip(psi).enumerate() {
                let v = gb.re * h.im - gb.im * h.re;
                if term.sign(b) {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
        }
    }
    acc
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T: Scalar> {
    dim: usize,
    entries: Vec<C<T>>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = C::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "operator entries",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// Dense matrix of one control term.
    pub fn from_term(term: ControlTerm, n: usize) -> Result<Self> {
        term.validate(n)?;
        let dim = 1 << n;
        let mut m = Self::zeros(dim);
        m.add_term(term, T::one());
        Ok(m)
    }

    fn add_term(&mut self, term: ControlTerm, coeff: T) {
        let dim = self.dim;
        for b in 0..dim {
            match term {
                ControlTerm::X(q) => {
                    let r = b ^ (1 << q);
                    self.entries[r * dim + b].re += coeff;
                }
                _ => {
                    let v = if term.sign(b) { -coeff } else { coeff };
                    self.entries[b * dim + b].re += v;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.entries[r * self.dim + c]
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            let out_row = &mut out.entries[i * d..(i + 1) * d];
            for (k, a) in row.iter().enumerate() {
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let other_row = &other.entries[k * d..(k + 1) * d];
                for (o, b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, state: &StateVector<T>) -> Result<StateVector<T>> {
        if state.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, state.dim()));
        }
        let d = self.dim;
        let amps = (0..d)
            .map(|i| inner_unconj(&self.entries[i * d..(i + 1) * d], &state.amps))
            .collect();
        Ok(StateVector { n: state.n, amps })
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.entries[j * d + i] = self.entries[i * d + j].conj();
            }
        }
        out
    }

    pub fn scaled(&self, s: C<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| self.entries[i * d + j].norm()).sum::<T>())
            .fold(T::zero(), T::max)
    }
}

#[inline]
fn inner_unconj<T: Scalar>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x * y)
}

/// `H = Σ_i f_i H_i` as a dense Hermitian matrix.
pub fn build_hamiltonian<T: Scalar>(coeffs: &[T], n: usize) -> Result<DenseOperator<T>> {
    check_qubits(n)?;
    let m = term_count(n);
    if coeffs.len() != m {
        return Err(Error::LengthMismatch {
            what: "hamiltonian coefficients",
            expected: m,
            got: coeffs.len(),
        });
    }
    let mut h = DenseOperator::zeros(1 << n);
    for (i, &f) in coeffs.iter().enumerate() {
        if f != T::zero() {
            h.add_term(ControlTerm::from_index(i, n)?, f);
        }
    }
    Ok(h)
}

/// `e^{-iτ·op}` by scaling and squaring around a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// series is summed until the next term drops below machine precision
/// relative to the partial sum, and the result is squared `s` times.
pub fn dense_expm<T: Scalar>(op: &DenseOperator<T>, tau: T) -> DenseOperator<T> {
    let d = op.dim;
    let a = op.scaled(cplx(T::zero(), -tau));
    let norm = a.norm1();
    let half = T::of(0.5);
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > half {
        scale *= half;
        squarings += 1;
    }
    let a = a.scaled(cplx(scale, T::zero()));

    let mut sum = DenseOperator::identity(d);
    let mut term = DenseOperator::identity(d);
    let eps = T::epsilon();
    for k in 1..=40 {
        term = term.matmul(&a).scaled(cplx(T::one() / T::of(k as f64), T::zero()));
        for (s, t) in sum.entries.iter_mut().zip(&term.entries) {
            *s += t;
        }
        if term.norm1() <= eps * sum.norm1() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut impl Rng) -> StateVector<f64> {
        let amps = (0..1 << n)
            .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mut s = StateVector::from_amps(n, amps).unwrap();
        s.normalize();
        s
    }

    #[test]
    fn term_counts() {
        assert_eq!(term_count(1), 2);
        assert_eq!(term_count(2), 5);
        assert_eq!(term_count(10), 65);
    }

    #[test]
    fn term_index_layout() {
        let n = 4;
        let terms = ControlTerm::all(n);
        assert_eq!(terms.len(), 14);
        assert_eq!(terms[0], ControlTerm::X(0));
        assert_eq!(terms[4], ControlTerm::Z(0));
        assert_eq!(terms[8], ControlTerm::ZZ(0, 1));
        assert_eq!(terms[10], ControlTerm::ZZ(0, 3));
        assert_eq!(terms[11], ControlTerm::ZZ(1, 2));
        assert_eq!(terms[13], ControlTerm::ZZ(2, 3));
        for (i, t) in terms.iter().enumerate() {
            assert_eq!(t.index(n), i);
        }
        assert!(ControlTerm::from_index(14, n).is_err());
    }

    #[test]
    fn pauli_actions() {
        let zero = StateVector::<f64>::basis(1, 0).unwrap();
        let one = StateVector::<f64>::basis(1, 1).unwrap();
        assert_eq!(apply_term(&zero, ControlTerm::X(0)).unwrap(), one);
        let z1 = apply_term(&one, ControlTerm::Z(0)).unwrap();
        assert_eq!(z1.amps()[1], C::new(-1.0, 0.0));
        // qubit 0 set, qubit 1 clear: bits differ
        let s01 = StateVector::<f64>::basis(2, 1).unwrap();
        let zz = apply_term(&s01, ControlTerm::ZZ(0, 1)).unwrap();
        assert_eq!(zz.amps()[1], C::new(-1.0, 0.0));
    }

    #[test]
    fn apply_term_rejects_bad_qubit() {
        let s = StateVector::<f64>::zero_state(2).unwrap();
        assert!(matches!(
            apply_term(&s, ControlTerm::X(2)),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(apply_term(&s, ControlTerm::ZZ(1, 1)).is_err());
    }

    #[test]
    fn rotation_closed_forms() {
        let zero = StateVector::<f64>::zero_state(1).unwrap();
        let r = pauli_rotation(&zero, ControlTerm::X(0), std::f64::consts::FRAC_PI_2).unwrap();
        assert!(r.amps()[0].norm() < 1e-15);
        assert!((r.amps()[1] - C::new(0.0, -1.0)).norm() < 1e-15);

        let s = StateVector::from_amps(
            1,
            vec![C::new(0.5f64.sqrt(), 0.0), C::new(0.5f64.sqrt(), 0.0)],
        )
        .unwrap();
        let r = pauli_rotation(&s, ControlTerm::Z(0), 0.3).unwrap();
        let h = build_hamiltonian(&[0.0, 1.0], 1).unwrap();
        let want = dense_expm(&h, 0.3).apply(&s).unwrap();
        assert!(r.max_abs_diff(&want) < 1e-14);
        let e = C::from_polar(0.5f64.sqrt(), -0.3);
        assert!((r.amps()[0] - e).norm() < 1e-15);
        assert!((r.amps()[1] - e.conj()).norm() < 1e-15);
    }

    #[test]
    fn rotation_identity_at_zero_angle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(3, &mut rng);
        for t in ControlTerm::all(3) {
            assert_eq!(pauli_rotation(&s, t, 0.0).unwrap(), s);
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let h = build_hamiltonian(&[0.0; 5], 2).unwrap();
        assert_eq!(h, DenseOperator::zeros(4));
        let x = build_hamiltonian(&[1.0, 0.0], 1).unwrap();
        assert_eq!(x.get(0, 1), C::new(1.0, 0.0));
        assert_eq!(x.get(1, 0), C::new(1.0, 0.0));
        assert_eq!(x.get(0, 0), C::new(0.0, 0.0));
        let zz = build_hamiltonian(&[0.0, 0.0, 0.0, 0.0, 1.0], 2).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| zz.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(
            build_hamiltonian(&[1.0; 4], 2),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let coeffs: Vec<f64> = (0..term_count(3)).map(|_| rng.gen_range(-2.0..2.0)).collect();
        assert!(build_hamiltonian(&coeffs, 3).unwrap().is_hermitian(1e-12));
    }

    #[test]
    fn expm_of_zero_and_sigma_x() {
        let z = DenseOperator::<f64>::zeros(4);
        assert!(dense_expm(&z, 1.0).max_abs_diff(&DenseOperator::identity(4)) < 1e-15);
        let x = build_hamiltonian(&[1.0, 0.0], 1).unwrap();
        let u = dense_expm(&x, 1.0);
        let (s, c) = 1f64.sin_cos();
        assert!((u.get(0, 0) - C::new(c, 0.0)).norm() < 1e-14);
        assert!((u.get(0, 1) - C::new(0.0, -s)).norm() < 1e-14);
        assert!((u.get(1, 0) - C::new(0.0, -s)).norm() < 1e-14);
        assert!((u.get(1, 1) - C::new(c, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn expm_is_unitary_for_large_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let coeffs: Vec<f64> = (0..term_count(4)).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let h = build_hamiltonian(&coeffs, 4).unwrap();
        let u = dense_expm(&h, 2.5);
        let uu = u.dagger().matmul(&u);
        assert!(uu.max_abs_diff(&DenseOperator::identity(16)) < 1e-10);
    }

    #[test]
    fn expm_matches_commuting_rotations() {
        // Only Z and ZZ terms: all commute, so the product of rotations is exact.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 3;
        let mut coeffs: Vec<f64> = (0..term_count(n)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        coeffs[..n].iter_mut().for_each(|c| *c = 0.0);
        let s = random_state(n, &mut rng);
        let want = dense_expm(&build_hamiltonian(&coeffs, n).unwrap(), 0.1)
            .apply(&s)
            .unwrap();
        let mut got = s.clone();
        for (i, &f) in coeffs.iter().enumerate() {
            let t = ControlTerm::from_index(i, n).unwrap();
            got = pauli_rotation(&got, t, 0.1 * f).unwrap();
        }
        assert!(got.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn im_inner_term_matches_explicit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_state(3, &mut rng);
        let psi = random_state(3, &mut rng);
        for t in ControlTerm::all(3) {
            let h = apply_term(&psi, t).unwrap();
            let want = g.inner(&h).unwrap().im;
            let got = im_inner_term(g.amps(), psi.amps(), t);
            assert!((want - got).abs() < 1e-14);
        }
    }

    #[test]
    fn single_precision_rotation() {
        let s = StateVector::<f32>::zero_state(2).unwrap();
        let r = pauli_rotation(&s, ControlTerm::X(1), 0.4f32).unwrap();
        assert!((r.norm_sqr() - 1.0).abs() < 1e-6);
        assert!((r.amps()[2].im + 0.4f32.sin()).abs() < 1e-6);
    }
}
