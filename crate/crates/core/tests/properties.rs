// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use annealnet::data::{self, Split};
use annealnet::evolution::{backprop_schedule_traced, evolve, overlap_error, EvolutionMethod};
use annealnet::learning::Tensor;
use annealnet::objective::{classify, clustering_loss, hs_distance, hs_distance_to_pure, ClassStats};
use annealnet::qcore::{apply_term, dense_expm, pauli_rotation, term_count, ControlTerm};
use annealnet::{ControlSchedule, DenseOperator, Network, StateVector};

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::from_amps(n, amps).unwrap();
    s.normalize();
    s
}

fn random_schedule(n: usize, steps: usize, rng: &mut ChaCha8Rng) -> ControlSchedule {
    let flat = (0..steps * term_count(n)).map(|_| rng.gen_range(-1.5..1.5)).collect();
    ControlSchedule::from_flat(flat, n, steps, 1.0).unwrap()
}

fn method_strategy() -> impl Strategy<Value = EvolutionMethod> {
    prop_oneof![
        Just(EvolutionMethod::Exact),
        (1usize..=3, 1usize..=6).prop_map(|(o, tn)| EvolutionMethod::trotter([1, 2, 4][o - 1], tn).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn terms_are_involutions(n in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(n, &mut rng);
        for term in ControlTerm::all(n) {
            let twice = apply_term(&apply_term(&psi, term).unwrap(), term).unwrap();
            prop_assert!(twice.max_abs_diff(&psi) < 1e-15);
        }
    }

    #[test]
    fn rotation_preserves_norm_and_matches_expm(n in 1usize..=4, seed in any::<u64>(), theta in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(n, &mut rng);
        let terms = ControlTerm::all(n);
        let term = terms[rng.gen_range(0..terms.len())];
        let out = pauli_rotation(&psi, term, theta).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let dense = dense_expm(&DenseOperator::from_term(term, n).unwrap(), theta).apply(&psi).unwrap();
        prop_assert!(out.max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn expm_is_unitary(n in 1usize..=4, seed in any::<u64>(), tau in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<f64> = (0..term_count(n)).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let h = annealnet::qcore::build_hamiltonian(&coeffs, n).unwrap();
        let u = dense_expm(&h, tau);
        let id = DenseOperator::identity(1 << n);
        prop_assert!(u.dagger().matmul(&u).max_abs_diff(&id) < 1e-10);
    }

    #[test]
    fn evolution_preserves_norm(n in 1usize..=6, steps in 1usize..=4, method in method_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (psi, _) = evolve(&random_schedule(n, steps, &mut rng), method).unwrap();
        prop_assert!((psi.norm_sqr().sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backward_reconstruction_matches_checkpoints(n in 1usize..=4, steps in 1usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sched = random_schedule(n, steps, &mut rng);
        let (psi, tape) = evolve(&sched, EvolutionMethod::trotter(2, 3).unwrap()).unwrap();
        let g = random_state(n, &mut rng);
        let (grad, dev) = backprop_schedule_traced(&tape, g.amps()).unwrap();
        prop_assert!(dev < 1e-9);
        prop_assert_eq!(grad.as_flat().len(), sched.as_flat().len());
        prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hs_distance_is_symmetric_and_nonnegative(n in 1usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stats = ClassStats::new(2, 1 << n);
        for i in 0..6 {
            stats.accumulate(&random_state(n, &mut rng), i % 2).unwrap();
        }
        let r = stats.finalize().unwrap();
        let ab = hs_distance(&r[0], &r[1]).unwrap();
        let ba = hs_distance(&r[1], &r[0]).unwrap();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!(ab >= 0.0);
        prop_assert!(hs_distance(&r[0], &r[0]).unwrap().abs() < 1e-12);
        let psi = random_state(n, &mut rng);
        let pure = annealnet::DensityMatrix::pure(&psi, 0);
        let direct = hs_distance(&pure, &r[1]).unwrap();
        prop_assert!((hs_distance_to_pure(&psi, &r[1]).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn loss_is_bounded_and_classify_ignores_phase(n in 1usize..=3, k in 2usize..=4, seed in any::<u64>(), phi in 0.0f64..6.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut stats = ClassStats::new(k, 1 << n);
        for i in 0..3 * k {
            stats.accumulate(&random_state(n, &mut rng), i % k).unwrap();
        }
        let rhos = stats.finalize().unwrap();
        for r in &rhos {
            prop_assert!((r.trace().re - 1.0).abs() < 1e-10);
            prop_assert!(r.is_hermitian(1e-12));
        }
        let loss = clustering_loss(&rhos).unwrap();
        prop_assert!((-2.0..=0.0).contains(&loss));
        let psi = random_state(n, &mut rng);
        prop_assert_eq!(classify(&psi, &rhos), classify(&psi.clone().with_global_phase(phi), &rhos));
    }

    #[test]
    fn normalization_constraints_and_idempotence(rows in 2usize..40, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let feats: Vec<f32> = (0..rows * cols).map(|_| rng.gen_range(-5.0f32..20.0) * rng.gen::<f32>()).collect();
        let labels = (0..rows).map(|i| i % 2).collect();
        let ds = data::Dataset::new("r", Split::Train, cols, 2, feats, labels).unwrap();
        let (a, _, _) = data::normalize(&ds, &ds).unwrap();
        let (lo, hi, mean) = a.stats();
        prop_assert_eq!(lo, -1.0);
        prop_assert_eq!(hi, 1.0);
        prop_assert!(mean.abs() < 1e-6, "mean {}", mean);
        let (b, _, _) = data::normalize(&a, &a).unwrap();
        let diff = a.features().iter().zip(b.features()).map(|(x, y)| (x - y).abs()).fold(0f32, f32::max);
        prop_assert!(diff < 1e-6);
    }

    #[test]
    fn forward_is_deterministic(seed in any::<u64>()) {
        let net = Network::mlp(7, 4, true, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Tensor::new(vec![3, 7], (0..21).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let a = net.predict(&x).unwrap();
        let b = net.clone().forward(&x).unwrap();
        prop_assert_eq!(a.data(), b.data());
        prop_assert!(a.data().iter().all(|&v| v > 0.0 && v < 1.0));
    }
}

#[test]
fn trotter_order_two_converges_to_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 1..=4 {
        let sched = random_schedule(n, 3, &mut rng);
        let (exact, _) = evolve(&sched, EvolutionMethod::Exact).unwrap();
        let (approx, _) = evolve(&sched, EvolutionMethod::trotter(2, 200).unwrap()).unwrap();
        let err = overlap_error(&approx, &exact).unwrap();
        assert!(err < 1e-6, "n={n}: {err}");
    }
}
