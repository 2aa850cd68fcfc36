// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Time evolution of `|0…0⟩` under a piecewise-constant schedule, and
//! reverse-mode gradients of a scalar loss with respect to every coupling.
//!
//! Each slice applies `U_k = e^{-iΔt H(t_k)}`. `Exact` builds `U_k` with the
//! dense exponential; `Trotter` approximates it by a product of analytic
//! single-term rotations repeated `TN` times with step `δ = Δt / TN`:
//!
//! * order 1: `∏_i e^{-i f_i δ H_i}` in term-index order;
//! * order 2: the same product with `δ/2`, followed by its reverse;
//! * order 2k: Suzuki's recursion
//!   `U_2k(δ) = U_2k-2(s δ)² U_2k-2((1-4s) δ) U_2k-2(s δ)²`,
//!   `s = 1 / (4 - 4^{1/(2k-1)})`.
//!
//! Gradients are taken through the Trotterized product, which is the model
//! that actually runs. Cotangents follow the convention
//! `dL = Re Σ_b conj(g_b) dψ_b`, i.e. `g = ∂L/∂Re ψ + i ∂L/∂Im ψ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::qcore::{
    build_hamiltonian, dense_expm, im_inner_term, rotate_in_place, term_count, ControlTerm,
    StateVector,
};
use crate::scalar::{Scalar, C};
use crate::schedule::ControlSchedule;

/// Largest register the dense oracle accepts.
pub const EXACT_MAX_QUBITS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EvolutionMethod {
    /// Dense matrix exponential per slice.
    Exact,
    /// Suzuki–Trotter product of the given order with `trotter_number`
    /// sub-steps per slice.
    Trotter { order: usize, trotter_number: usize },
}

impl EvolutionMethod {
    pub fn trotter(order: usize, trotter_number: usize) -> Result<Self> {
        let m = EvolutionMethod::Trotter {
            order,
            trotter_number,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if let EvolutionMethod::Trotter {
            order,
            trotter_number,
        } = *self
        {
            check_order(order)?;
            if trotter_number == 0 {
                return Err(Error::InvalidMethod("Trotter number must be >= 1".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for EvolutionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionMethod::Exact => write!(f, "exact"),
            EvolutionMethod::Trotter {
                order,
                trotter_number,
            } => write!(f, "trotter{order}-tn{trotter_number}"),
        }
    }
}

fn check_order(order: usize) -> Result<()> {
    if order == 1 || (order >= 2 && order.is_multiple_of(2)) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder(order))
    }
}

/// One factor `e^{-i weight·δ·f_term H_term}` of a Trotter step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factor {
    pub term: usize,
    pub weight: f64,
}

/// Factor sequence of a single Trotter step of the given order over `m`
/// terms, in application order.
pub fn suzuki_factors(order: usize, m: usize) -> Result<Vec<Factor>> {
    check_order(order)?;
    if order == 1 {
        return Ok((0..m).map(|term| Factor { term, weight: 1.0 }).collect());
    }
    let mut seq: Vec<Factor> = (0..m)
        .map(|term| Factor { term, weight: 0.5 })
        .chain((0..m).rev().map(|term| Factor { term, weight: 0.5 }))
        .collect();
    let mut k = 2;
    while 2 * k <= order {
        let s = 1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * k as f64 - 1.0)));
        let scaled = |w: f64| seq.iter().map(move |f| Factor { term: f.term, weight: f.weight * w });
        let outer: Vec<Factor> = scaled(s).collect();
        let inner: Vec<Factor> = scaled(1.0 - 4.0 * s).collect();
        seq = [&outer[..], &outer[..], &inner[..], &outer[..], &outer[..]].concat();
        k += 1;
    }
    Ok(seq)
}

/// Precomputed rotation angles for one slice: `(term, θ)` in application
/// order for a single Trotter step.
fn slice_angles<T: Scalar>(
    factors: &[Factor],
    terms: &[ControlTerm],
    coeffs: &[T],
    delta: T,
) -> Vec<(ControlTerm, T, T)> {
    factors
        .iter()
        .map(|f| {
            let w = T::of(f.weight) * delta;
            (terms[f.term], w * coeffs[f.term], w)
        })
        .collect()
}

fn trotter_slice_in_place<T: Scalar>(amps: &mut [C<T>], angles: &[(ControlTerm, T, T)], tn: usize) {
    for _ in 0..tn {
        for &(term, theta, _) in angles {
            rotate_in_place(amps, term, theta);
        }
    }
}

/// Advances `state` by one slice of duration `delta_t` with the Trotter
/// product of the given order and Trotter number.
pub fn trotter_slice<T: Scalar>(
    state: &StateVector<T>,
    coeffs: &[T],
    delta_t: T,
    order: usize,
    trotter_number: usize,
) -> Result<StateVector<T>> {
    EvolutionMethod::trotter(order, trotter_number)?;
    let n = state.n();
    let m = term_count(n);
    if coeffs.len() != m {
        return Err(Error::LengthMismatch {
            what: "slice couplings",
            expected: m,
            got: coeffs.len(),
        });
    }
    let factors = suzuki_factors(order, m)?;
    let terms = ControlTerm::all(n);
    let delta = delta_t / T::of(trotter_number as f64);
    let angles = slice_angles(&factors, &terms, coeffs, delta);
    let mut out = state.clone();
    trotter_slice_in_place(out.amps_mut(), &angles, trotter_number);
    Ok(out)
}

/// Record of a forward evolution sufficient to reverse it.
#[derive(Clone, Debug)]
pub struct EvolutionTape<T: Scalar> {
    method: EvolutionMethod,
    schedule: ControlSchedule<T>,
    /// state at the start of each slice; `checkpoints[0] = |0…0⟩`
    checkpoints: Vec<StateVector<T>>,
    final_state: StateVector<T>,
}

impl<T: Scalar> EvolutionTape<T> {
    pub fn method(&self) -> EvolutionMethod {
        self.method
    }

    pub fn schedule(&self) -> &ControlSchedule<T> {
        &self.schedule
    }

    pub fn checkpoints(&self) -> &[StateVector<T>] {
        &self.checkpoints
    }

    pub fn final_state(&self) -> &StateVector<T> {
        &self.final_state
    }

    /// Re-runs the forward pass; deterministic, so the result equals
    /// [`EvolutionTape::final_state`] exactly.
    pub fn replay(&self) -> Result<StateVector<T>> {
        evolve(&self.schedule, self.method).map(|(s, _)| s)
    }
}

/// Evolves `|0…0⟩` through every slice of `schedule`.
pub fn evolve<T: Scalar>(
    schedule: &ControlSchedule<T>,
    method: EvolutionMethod,
) -> Result<(StateVector<T>, EvolutionTape<T>)> {
    method.validate()?;
    let n = schedule.n();
    if let Some(index) = schedule.as_flat().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "schedule",
            index,
        });
    }
    let mut state = StateVector::zero_state(n)?;
    let mut checkpoints = Vec::with_capacity(schedule.steps());
    let dt = schedule.delta_t();
    match method {
        EvolutionMethod::Exact => {
            if n > EXACT_MAX_QUBITS {
                return Err(Error::InvalidMethod(format!(
                    "exact evolution limited to {EXACT_MAX_QUBITS} qubits, got {n}"
                )));
            }
            for k in 0..schedule.steps() {
                checkpoints.push(state.clone());
                let h = build_hamiltonian(schedule.slice(k), n)?;
                state = dense_expm(&h, dt).apply(&state)?;
            }
        }
        EvolutionMethod::Trotter {
            order,
            trotter_number,
        } => {
            let factors = suzuki_factors(order, schedule.terms())?;
            let terms = ControlTerm::all(n);
            let delta = dt / T::of(trotter_number as f64);
            for k in 0..schedule.steps() {
                checkpoints.push(state.clone());
                let angles = slice_angles(&factors, &terms, schedule.slice(k), delta);
                trotter_slice_in_place(state.amps_mut(), &angles, trotter_number);
            }
        }
    }
    let tape = EvolutionTape {
        method,
        schedule: schedule.clone(),
        checkpoints,
        final_state: state.clone(),
    };
    Ok((state, tape))
}

/// `1 − |⟨a|b⟩|`, clamped to `[0, 1]`.
///
/// Evaluated as `½‖a − e^{iφ}b‖²` (with the phase aligning the two states)
/// corrected by the norm defects of `a` and `b`, which equals `1 − |⟨a|b⟩|`
/// algebraically but keeps full relative precision when the states are close.
pub fn overlap_error<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    let ip = a.inner(b)?;
    let mag = ip.norm();
    if mag == T::zero() {
        return Ok(T::one());
    }
    let phase = ip.conj().unscale(mag);
    let half = T::of(0.5);
    let dist: T = a
        .amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| (x - y * phase).norm_sqr())
        .sum();
    let err = half * dist - half * (a.norm_sqr() - T::one()) - half * (b.norm_sqr() - T::one());
    Ok(err.max(T::zero()).min(T::one()))
}

/// Gradient of the loss with respect to every coupling `f_ik`, laid out as
/// a schedule of the same shape.
pub fn backprop_schedule<T: Scalar>(
    tape: &EvolutionTape<T>,
    grad_out: &[C<T>],
) -> Result<ControlSchedule<T>> {
    backprop_schedule_traced(tape, grad_out).map(|(g, _)| g)
}

/// As [`backprop_schedule`], also returning the largest deviation between a
/// slice-start state rebuilt by inverse rotations and its checkpoint.
pub fn backprop_schedule_traced<T: Scalar>(
    tape: &EvolutionTape<T>,
    grad_out: &[C<T>],
) -> Result<(ControlSchedule<T>, T)> {
    let (order, tn) = match tape.method {
        EvolutionMethod::Trotter {
            order,
            trotter_number,
        } => (order, trotter_number),
        EvolutionMethod::Exact => {
            return Err(Error::MethodMismatch(
                "gradients are only available for Trotter evolution",
            ))
        }
    };
    let schedule = &tape.schedule;
    let dim = tape.final_state.dim();
    if grad_out.len() != dim {
        return Err(Error::LengthMismatch {
            what: "state cotangent",
            expected: dim,
            got: grad_out.len(),
        });
    }
    let n = schedule.n();
    let m = schedule.terms();
    let factors = suzuki_factors(order, m)?;
    let terms = ControlTerm::all(n);
    let delta = schedule.delta_t() / T::of(tn as f64);

    let mut grad = ControlSchedule::zeros(n, schedule.steps(), schedule.total_time());
    let mut g: Vec<C<T>> = grad_out.to_vec();
    let mut psi: Vec<C<T>> = tape.final_state.amps().to_vec();
    let mut max_dev = T::zero();

    for k in (0..schedule.steps()).rev() {
        let angles = slice_angles(&factors, &terms, schedule.slice(k), delta);
        let mut slice_grad = vec![T::zero(); m];
        for _ in 0..tn {
            for (f, &(term, theta, w)) in factors.iter().zip(&angles).rev() {
                // ψ is the output of this factor here.
                slice_grad[f.term] += w * im_inner_term(&g, &psi, term);
                rotate_in_place(&mut psi, term, -theta);
                rotate_in_place(&mut g, term, -theta);
            }
        }
        let out = grad.as_flat_mut();
        out[k * m..(k + 1) * m].copy_from_slice(&slice_grad);

        let checkpoint = tape.checkpoints[k].amps();
        let dev = psi
            .iter()
            .zip(checkpoint)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max);
        max_dev = max_dev.max(dev);
        psi.copy_from_slice(checkpoint);
    }
    Ok((grad, max_dev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_schedule(n: usize, steps: usize, rng: &mut impl Rng) -> ControlSchedule<f64> {
        let flat = (0..steps * term_count(n)).map(|_| rng.gen_range(0.0..1.0)).collect();
        ControlSchedule::from_flat(flat, n, steps, 1.0).unwrap()
    }

    #[test]
    fn factor_lists() {
        let f1 = suzuki_factors(1, 3).unwrap();
        assert_eq!(f1.iter().map(|f| f.term).collect::<Vec<_>>(), vec![0, 1, 2]);
        let f2 = suzuki_factors(2, 3).unwrap();
        assert_eq!(f2.iter().map(|f| f.term).collect::<Vec<_>>(), vec![0, 1, 2, 2, 1, 0]);
        let f4 = suzuki_factors(4, 3).unwrap();
        assert_eq!(f4.len(), 30);
        // total weight per term is 1 for every order
        for seq in [&f1, &f2, &f4] {
            for t in 0..3 {
                let w: f64 = seq.iter().filter(|f| f.term == t).map(|f| f.weight).sum();
                assert!((w - 1.0).abs() < 1e-14);
            }
        }
        let s = 1.0 / (4.0 - 4f64.powf(1.0 / 3.0));
        assert!((f4[0].weight - 0.5 * s).abs() < 1e-15);
        assert!(matches!(suzuki_factors(3, 3), Err(Error::UnsupportedOrder(3))));
        assert!(suzuki_factors(0, 3).is_err());
    }

    #[test]
    fn zero_schedule_keeps_ground_state() {
        let s = ControlSchedule::<f64>::zeros(3, 4, 1.0);
        for method in [
            EvolutionMethod::Exact,
            EvolutionMethod::trotter(1, 3).unwrap(),
            EvolutionMethod::trotter(4, 2).unwrap(),
        ] {
            let (psi, _) = evolve(&s, method).unwrap();
            assert!(psi.max_abs_diff(&StateVector::zero_state(3).unwrap()) < 1e-15);
        }
    }

    #[test]
    fn single_qubit_closed_form() {
        let s = ControlSchedule::from_flat(vec![1.0, 0.0], 1, 1, 1.0).unwrap();
        let (psi, _) = evolve(&s, EvolutionMethod::Exact).unwrap();
        let (sn, cs) = 1f64.sin_cos();
        assert!((psi.amps()[0] - C::new(cs, 0.0)).norm() < 1e-14);
        assert!((psi.amps()[1] - C::new(0.0, -sn)).norm() < 1e-14);
    }

    #[test]
    fn trotter_exact_for_commuting_terms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let dt = 0.37;
        let psi0 = {
            let mut s = StateVector::from_amps(
                n,
                (0..8).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            )
            .unwrap();
            s.normalize();
            s
        };
        let mut diag: Vec<f64> = (0..term_count(n)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        diag[..n].iter_mut().for_each(|c| *c = 0.0);
        let mut xonly = vec![0.0; term_count(n)];
        xonly[..n].iter_mut().for_each(|c| *c = rng.gen_range(-1.0..1.0));
        for coeffs in [diag, xonly] {
            let want = dense_expm(&build_hamiltonian(&coeffs, n).unwrap(), dt)
                .apply(&psi0)
                .unwrap();
            for (order, tn) in [(1, 1), (2, 3), (4, 1)] {
                let got = trotter_slice(&psi0, &coeffs, dt, order, tn).unwrap();
                assert!(got.max_abs_diff(&want) < 1e-12, "order {order} tn {tn}");
            }
        }
    }

    #[test]
    fn trotter_slice_rejects_bad_input() {
        let s = StateVector::<f64>::zero_state(2).unwrap();
        assert!(matches!(
            trotter_slice(&s, &[0.0; 5], 0.1, 3, 1),
            Err(Error::UnsupportedOrder(3))
        ));
        assert!(trotter_slice(&s, &[0.0; 4], 0.1, 2, 1).is_err());
        assert!(trotter_slice(&s, &[0.0; 5], 0.1, 2, 0).is_err());
    }

    #[test]
    fn overlap_error_cases() {
        let a = StateVector::<f64>::basis(2, 1).unwrap();
        let b = StateVector::<f64>::basis(2, 2).unwrap();
        assert_eq!(overlap_error(&a, &a).unwrap(), 0.0);
        assert_eq!(overlap_error(&a, &b).unwrap(), 1.0);
        let rotated = a.clone().with_global_phase(1.234);
        assert!(overlap_error(&a, &rotated).unwrap() < 1e-15);
        let c = StateVector::<f64>::zero_state(1).unwrap();
        assert!(matches!(overlap_error(&a, &c), Err(Error::DimensionMismatch(4, 2))));
    }

    #[test]
    fn overlap_error_matches_direct_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let mut a = StateVector::from_amps(
                2,
                (0..4).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            )
            .unwrap();
            let mut b = a.clone();
            b.amps_mut()[0] += C::new(0.3, -0.1);
            a.normalize();
            b.normalize();
            let direct: f64 = 1.0 - a.inner(&b).unwrap().norm();
            assert!((overlap_error(&a, &b).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn non_finite_schedule_rejected() {
        let mut s = ControlSchedule::<f64>::zeros(1, 2, 1.0);
        s.as_flat_mut()[3] = f64::INFINITY;
        assert!(matches!(
            evolve(&s, EvolutionMethod::trotter(2, 1).unwrap()),
            Err(Error::NonFinite { index: 3, .. })
        ));
    }

    #[test]
    fn tape_replay_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_schedule(3, 4, &mut rng);
        let (psi, tape) = evolve(&s, EvolutionMethod::trotter(2, 5).unwrap()).unwrap();
        assert_eq!(tape.replay().unwrap(), psi);
        assert_eq!(tape.checkpoints().len(), 4);
    }

    #[test]
    fn exact_tape_cannot_backprop() {
        let s = ControlSchedule::<f64>::zeros(1, 1, 1.0);
        let (_, tape) = evolve(&s, EvolutionMethod::Exact).unwrap();
        assert!(matches!(
            backprop_schedule(&tape, &[C::new(0.0, 0.0); 2]),
            Err(Error::MethodMismatch(_))
        ));
    }

    /// L = 1 − |⟨0…0|ψ⟩|²; cotangent g = −2 ⟨0|ψ⟩ e_0.
    fn ground_loss(psi: &StateVector<f64>) -> (f64, Vec<C<f64>>) {
        let a0 = psi.amps()[0];
        let mut g = vec![C::new(0.0, 0.0); psi.dim()];
        g[0] = a0 * -2.0;
        (1.0 - a0.norm_sqr(), g)
    }

    #[test]
    fn diagonal_rows_have_zero_gradient_at_zero_schedule() {
        let n = 2;
        let s = ControlSchedule::<f64>::zeros(n, 3, 1.0);
        let method = EvolutionMethod::trotter(2, 4).unwrap();
        let (psi, tape) = evolve(&s, method).unwrap();
        let (_, g) = ground_loss(&psi);
        let grad = backprop_schedule(&tape, &g).unwrap();
        for k in 0..3 {
            for i in n..term_count(n) {
                assert!(grad.get(i, k).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 2;
        let s = random_schedule(n, 3, &mut rng);
        for method in [
            EvolutionMethod::trotter(1, 3).unwrap(),
            EvolutionMethod::trotter(2, 2).unwrap(),
            EvolutionMethod::trotter(4, 1).unwrap(),
        ] {
            let (psi, tape) = evolve(&s, method).unwrap();
            let (_, g) = ground_loss(&psi);
            let (grad, dev) = backprop_schedule_traced(&tape, &g).unwrap();
            assert!(dev < 1e-12);
            let h = 1e-4;
            for idx in 0..s.as_flat().len() {
                let mut plus = s.clone();
                plus.as_flat_mut()[idx] += h;
                let mut minus = s.clone();
                minus.as_flat_mut()[idx] -= h;
                let lp = ground_loss(&evolve(&plus, method).unwrap().0).0;
                let lm = ground_loss(&evolve(&minus, method).unwrap().0).0;
                let fd = (lp - lm) / (2.0 * h);
                let an = grad.as_flat()[idx];
                assert!(
                    (fd - an).abs() <= 1e-5 * fd.abs().max(1e-3),
                    "{method} idx {idx}: fd {fd} vs {an}"
                );
            }
        }
    }

    #[test]
    fn insensitive_final_z_term_has_zero_gradient() {
        // A Z rotation in the last slice only changes phases, which the
        // ground-state population ignores.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 2;
        let s = random_schedule(n, 2, &mut rng);
        let method = EvolutionMethod::trotter(1, 1).unwrap();
        let (psi, tape) = evolve(&s, method).unwrap();
        let (_, g) = ground_loss(&psi);
        let grad = backprop_schedule(&tape, &g).unwrap();
        // Order 1: the diagonal block comes after all X rotations in a slice.
        for i in n..term_count(n) {
            assert!(grad.get(i, 1).abs() < 1e-9, "term {i}: {}", grad.get(i, 1));
        }
    }
}
