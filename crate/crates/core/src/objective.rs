// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Class density matrices, the Hilbert–Schmidt distance, the clustering
//! loss with its state cotangents, and nearest-cluster classification.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::qcore::StateVector;
use crate::scalar::{Scalar, C};

/// Mixed state `ρ_j` of one class. Entries are row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    dim: usize,
    entries: Vec<C<T>>,
    label: usize,
}

impl<T: Scalar> DensityMatrix<T> {
    /// `|ψ⟩⟨ψ|`.
    pub fn pure(psi: &StateVector<T>, label: usize) -> Self {
        let dim = psi.dim();
        let mut entries = vec![C::new(T::zero(), T::zero()); dim * dim];
        add_outer(&mut entries, psi.amps(), T::one());
        Self {
            dim,
            entries,
            label,
        }
    }

    pub fn from_entries(dim: usize, entries: Vec<C<T>>, label: usize) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                what: "density matrix entries",
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Ok(Self {
            dim,
            entries,
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> usize {
        self.label
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> C<T> {
        self.entries[r * self.dim + c]
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).map(|i| self.get(i, i)).fold(C::new(T::zero(), T::zero()), |a, b| a + b)
    }

    /// `Tr ρ²`, which for Hermitian ρ is the squared Frobenius norm.
    pub fn purity(&self) -> T {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let d = self.dim;
        (0..d).all(|i| (i..d).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `⟨ψ|ρ|ψ⟩` (real for Hermitian ρ).
    pub fn expectation(&self, psi: &StateVector<T>) -> T {
        let a = psi.amps();
        let d = self.dim;
        let mut acc = C::new(T::zero(), T::zero());
        for r in 0..d {
            let row = &self.entries[r * d..(r + 1) * d];
            let rho_psi = row.iter().zip(a).fold(C::new(T::zero(), T::zero()), |s, (x, y)| s + x * y);
            acc += a[r].conj() * rho_psi;
        }
        acc.re
    }

    /// `ρ|ψ⟩`.
    pub fn apply(&self, amps: &[C<T>]) -> Vec<C<T>> {
        let d = self.dim;
        (0..d)
            .map(|r| {
                self.entries[r * d..(r + 1) * d]
                    .iter()
                    .zip(amps)
                    .fold(C::new(T::zero(), T::zero()), |s, (x, y)| s + x * y)
            })
            .collect()
    }
}

fn add_outer<T: Scalar>(entries: &mut [C<T>], amps: &[C<T>], weight: T) {
    let d = amps.len();
    for r in 0..d {
        let ar = amps[r].scale(weight);
        let row = &mut entries[r * d..(r + 1) * d];
        for (e, ac) in row.iter_mut().zip(amps) {
            *e += ar * ac.conj();
        }
    }
}

/// Streaming per-class sums of `|ψ⟩⟨ψ|`.
#[derive(Clone, Debug)]
pub struct ClassStats<T: Scalar> {
    dim: usize,
    counts: Vec<usize>,
    sums: Vec<Vec<C<T>>>,
}

impl<T: Scalar> ClassStats<T> {
    pub fn new(num_classes: usize, dim: usize) -> Self {
        Self {
            dim,
            counts: vec![0; num_classes],
            sums: vec![vec![C::new(T::zero(), T::zero()); dim * dim]; num_classes],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn accumulate(&mut self, psi: &StateVector<T>, label: usize) -> Result<()> {
        let k = self.counts.len();
        if label >= k {
            return Err(Error::UnknownLabel { label, k });
        }
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, psi.dim()));
        }
        add_outer(&mut self.sums[label], psi.amps(), T::one());
        self.counts[label] += 1;
        Ok(())
    }

    /// Adds another partial accumulation into this one.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.dim != self.dim || other.counts.len() != self.counts.len() {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        for (j, (s, o)) in self.sums.iter_mut().zip(&other.sums).enumerate() {
            for (a, b) in s.iter_mut().zip(o) {
                *a += b;
            }
            self.counts[j] += other.counts[j];
        }
        Ok(())
    }

    /// `ρ_j = sum_j / N_j` for every class; every class must be non-empty.
    pub fn finalize(&self) -> Result<Vec<DensityMatrix<T>>> {
        (0..self.counts.len())
            .map(|j| self.class_density(j).ok_or(Error::EmptyClass(j)))
            .collect()
    }

    /// `ρ_j` for class `j`, or `None` if it has no samples yet.
    pub fn class_density(&self, j: usize) -> Option<DensityMatrix<T>> {
        let nj = *self.counts.get(j)?;
        if nj == 0 {
            return None;
        }
        let inv = T::one() / T::of(nj as f64);
        Some(DensityMatrix {
            dim: self.dim,
            entries: self.sums[j].iter().map(|e| e.scale(inv)).collect(),
            label: j,
        })
    }
}

/// `Tr[(ρ − σ)²] = ‖ρ − σ‖₂²`.
pub fn hs_distance<T: Scalar>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<T> {
    if rho.dim != sigma.dim {
        return Err(Error::DimensionMismatch(rho.dim, sigma.dim));
    }
    Ok(rho
        .entries
        .iter()
        .zip(&sigma.entries)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum())
}

/// `Tr[(|ψ⟩⟨ψ| − ρ)²] = Tr ρ² + ‖ψ‖⁴ − 2⟨ψ|ρ|ψ⟩`, without forming the projector.
pub fn hs_distance_to_pure<T: Scalar>(psi: &StateVector<T>, rho: &DensityMatrix<T>) -> Result<T> {
    if psi.dim() != rho.dim {
        return Err(Error::DimensionMismatch(psi.dim(), rho.dim));
    }
    let nn = psi.norm_sqr();
    Ok(rho.purity() + nn * nn - T::of(2.0) * rho.expectation(psi))
}

fn pair_weight<T: Scalar>(k: usize) -> T {
    T::of(2.0 / (k as f64 * (k as f64 - 1.0)))
}

/// Negative mean pairwise Hilbert–Schmidt distance over all `K(K−1)/2` pairs.
pub fn clustering_loss<T: Scalar>(rhos: &[DensityMatrix<T>]) -> Result<T> {
    let k = rhos.len();
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    let mut total = T::zero();
    for j in 0..k {
        for l in j + 1..k {
            total += hs_distance(&rhos[j], &rhos[l])?;
        }
    }
    Ok(-pair_weight::<T>(k) * total)
}

/// Loss value and `∂L/∂ρ_j` for each class matrix.
#[derive(Clone, Debug)]
pub struct LossGradient<T: Scalar> {
    pub loss: T,
    /// Hermitian matrices, same order as the input.
    pub d_rho: Vec<DensityMatrix<T>>,
}

/// Clustering loss plus an optional within-class spread penalty
/// `λ/K Σ_j (1 − Tr ρ_j²)`, with gradients with respect to each `ρ_j`.
///
/// `∂ D_HS(ρ, σ)/∂ρ = 2(ρ − σ)` and `∂ Tr ρ²/∂ρ = 2ρ`.
pub fn clustering_loss_grad<T: Scalar>(
    rhos: &[DensityMatrix<T>],
    compactness: T,
) -> Result<LossGradient<T>> {
    let k = rhos.len();
    let mut loss = clustering_loss(rhos)?;
    let w = pair_weight::<T>(k);
    let two = T::of(2.0);
    let lam = compactness / T::of(k as f64);
    let mut d_rho = Vec::with_capacity(k);
    for (j, rj) in rhos.iter().enumerate() {
        let mut g = vec![C::new(T::zero(), T::zero()); rj.dim * rj.dim];
        for (l, rl) in rhos.iter().enumerate() {
            if l == j {
                continue;
            }
            for ((gi, a), b) in g.iter_mut().zip(&rj.entries).zip(&rl.entries) {
                *gi -= (a - b).scale(w * two);
            }
        }
        if compactness != T::zero() {
            loss += lam * (T::one() - rj.purity());
            for (gi, a) in g.iter_mut().zip(&rj.entries) {
                *gi -= a.scale(lam * two);
            }
        }
        d_rho.push(DensityMatrix {
            dim: rj.dim,
            entries: g,
            label: rj.label,
        });
    }
    Ok(LossGradient { loss, d_rho })
}

/// Cotangent of one sample's final state given `G = ∂L/∂ρ_j` for its class
/// of size `N_j`: with `ρ_j = Σ |ψ⟩⟨ψ| / N_j`, `g = (2/N_j) G ψ`.
pub fn state_cotangent<T: Scalar>(d_rho: &DensityMatrix<T>, psi: &StateVector<T>, class_count: usize) -> Vec<C<T>> {
    let s = T::of(2.0 / class_count as f64);
    d_rho.apply(psi.amps()).into_iter().map(|v| v.scale(s)).collect()
}

/// Distance used to assign a final state to a class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierMetric {
    /// argmin_j `Tr[(|ψ⟩⟨ψ| − ρ_j)²]`
    #[default]
    HilbertSchmidt,
    /// argmax_j `⟨ψ|ρ_j|ψ⟩`
    Fidelity,
}

/// Nearest-cluster classifier over fixed class density matrices.
#[derive(Clone, Debug)]
pub struct NearestCluster<T: Scalar> {
    rhos: Vec<DensityMatrix<T>>,
    purities: Vec<T>,
    metric: ClassifierMetric,
}

impl<T: Scalar> NearestCluster<T> {
    pub fn new(rhos: Vec<DensityMatrix<T>>, metric: ClassifierMetric) -> Self {
        let purities = rhos.iter().map(DensityMatrix::purity).collect();
        Self {
            rhos,
            purities,
            metric,
        }
    }

    pub fn rhos(&self) -> &[DensityMatrix<T>] {
        &self.rhos
    }

    /// Score per class; lower is closer.
    pub fn scores(&self, psi: &StateVector<T>) -> Vec<T> {
        let nn = psi.norm_sqr();
        self.rhos
            .iter()
            .zip(&self.purities)
            .map(|(rho, &p)| {
                let f = rho.expectation(psi);
                match self.metric {
                    ClassifierMetric::HilbertSchmidt => p + nn * nn - T::of(2.0) * f,
                    ClassifierMetric::Fidelity => -f,
                }
            })
            .collect()
    }

    /// Lowest score wins; ties go to the lowest class id.
    pub fn classify(&self, psi: &StateVector<T>) -> usize {
        argmin(&self.scores(psi))
    }
}

/// Index of the smallest value, first one on ties.
pub fn argmin<T: PartialOrd + Copy>(xs: &[T]) -> usize {
    let mut best = 0;
    for (i, x) in xs.iter().enumerate().skip(1) {
        if *x < xs[best] {
            best = i;
        }
    }
    best
}

/// argmin_j `D_HS(|ψ⟩⟨ψ|, ρ_j)`, ties to the lowest id.
pub fn classify<T: Scalar>(psi: &StateVector<T>, rhos: &[DensityMatrix<T>]) -> usize {
    NearestCluster::new(rhos.to_vec(), ClassifierMetric::HilbertSchmidt).classify(psi)
}

/// How the averaged-input baseline compares a sample to the class means.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMetric {
    /// argmin_j ‖x − μ_j‖
    #[default]
    Euclidean,
    /// argmax_j ⟨x, μ_j⟩
    InnerProduct,
}

/// Per-class mean feature vectors.
#[derive(Clone, Debug)]
pub struct ClassMeans {
    means: Vec<Vec<f64>>,
    sq_norms: Vec<f64>,
}

impl ClassMeans {
    pub fn fit(train: &Dataset) -> Result<Self> {
        let f = train.num_features();
        let k = train.num_classes();
        let mut means = vec![vec![0.0f64; f]; k];
        let mut counts = vec![0usize; k];
        for (row, &y) in train.rows().zip(train.labels()) {
            counts[y] += 1;
            for (m, &x) in means[y].iter_mut().zip(row) {
                *m += f64::from(x);
            }
        }
        for (j, (m, &c)) in means.iter_mut().zip(&counts).enumerate() {
            if c == 0 {
                return Err(Error::EmptyClass(j));
            }
            m.iter_mut().for_each(|v| *v /= c as f64);
        }
        let sq_norms = means.iter().map(|m| m.iter().map(|v| v * v).sum()).collect();
        Ok(Self { means, sq_norms })
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    pub fn predict(&self, x: &[f32], metric: BaselineMetric) -> usize {
        let scores: Vec<f64> = self
            .means
            .iter()
            .zip(&self.sq_norms)
            .map(|(m, &mm)| {
                let dot: f64 = m.iter().zip(x).map(|(a, &b)| a * f64::from(b)).sum();
                match metric {
                    // ‖x‖² is shared by every class
                    BaselineMetric::Euclidean => mm - 2.0 * dot,
                    BaselineMetric::InnerProduct => -dot,
                }
            })
            .collect();
        argmin(&scores)
    }
}

/// Test accuracy of the nearest-class-mean classifier.
pub fn baseline_classify(train: &Dataset, test: &Dataset, metric: BaselineMetric) -> Result<f64> {
    if train.num_features() != test.num_features() {
        return Err(Error::DimensionMismatch(train.num_features(), test.num_features()));
    }
    let means = ClassMeans::fit(train)?;
    if test.is_empty() {
        return Ok(0.0);
    }
    let correct = test
        .rows()
        .zip(test.labels())
        .filter(|(x, &y)| means.predict(x, metric) == y)
        .count();
    Ok(correct as f64 / test.len() as f64)
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

    fn ket(n: usize, b: usize) -> StateVector<f64> {
        StateVector::basis(n, b).unwrap()
    }

    #[test]
    fn accumulate_single_and_orthogonal() {
        let mut st = ClassStats::<f64>::new(2, 2);
        st.accumulate(&ket(1, 0), 0).unwrap();
        st.accumulate(&ket(1, 0), 1).unwrap();
        st.accumulate(&ket(1, 1), 1).unwrap();
        let rhos = st.finalize().unwrap();
        assert_eq!(rhos[0], DensityMatrix::pure(&ket(1, 0), 0));
        assert_eq!(rhos[1].get(0, 0).re, 0.5);
        assert_eq!(rhos[1].get(1, 1).re, 0.5);
        assert_eq!(rhos[1].get(0, 1).norm(), 0.0);
        assert_eq!(st.total(), 3);
    }

    #[test]
    fn accumulate_errors() {
        let mut st = ClassStats::<f64>::new(2, 2);
        assert!(matches!(
            st.accumulate(&ket(1, 0), 2),
            Err(Error::UnknownLabel { label: 2, k: 2 })
        ));
        st.accumulate(&ket(1, 0), 0).unwrap();
        assert!(matches!(st.finalize(), Err(Error::EmptyClass(1))));
    }

    #[test]
    fn identical_states_give_same_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_state(2, &mut rng);
        let one = DensityMatrix::pure(&psi, 0);
        for count in [1, 3, 7] {
            let mut st = ClassStats::<f64>::new(1, 4);
            for _ in 0..count {
                st.accumulate(&psi, 0).unwrap();
            }
            let rho = st.finalize().unwrap().remove(0);
            assert!(hs_distance(&rho, &one).unwrap() < 1e-28);
        }
    }

    #[test]
    fn accumulation_order_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let states: Vec<_> = (0..12).map(|_| random_state(2, &mut rng)).collect();
        let mut fwd = ClassStats::<f64>::new(1, 4);
        let mut rev = ClassStats::<f64>::new(1, 4);
        for s in &states {
            fwd.accumulate(s, 0).unwrap();
        }
        for s in states.iter().rev() {
            rev.accumulate(s, 0).unwrap();
        }
        let a = fwd.finalize().unwrap();
        let b = rev.finalize().unwrap();
        assert!(a[0]
            .entries()
            .iter()
            .zip(b[0].entries())
            .all(|(x, y)| (x - y).norm() < 1e-12));
    }

    #[test]
    fn merge_equals_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut all = ClassStats::<f64>::new(2, 4);
        let mut a = ClassStats::<f64>::new(2, 4);
        let mut b = ClassStats::<f64>::new(2, 4);
        for i in 0..10 {
            let s = random_state(2, &mut rng);
            all.accumulate(&s, i % 2).unwrap();
            if i < 4 { &mut a } else { &mut b }.accumulate(&s, i % 2).unwrap();
        }
        a.merge(&b).unwrap();
        assert_eq!(a.counts(), all.counts());
        let x = a.finalize().unwrap();
        let y = all.finalize().unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!(hs_distance(p, q).unwrap() < 1e-28);
        }
    }

    #[test]
    fn one_qubit_eigenvalues_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut st = ClassStats::<f64>::new(1, 2);
        for _ in 0..9 {
            st.accumulate(&random_state(1, &mut rng), 0).unwrap();
        }
        let rho = st.finalize().unwrap().remove(0);
        // 2×2 Hermitian: λ = t/2 ± sqrt((a−d)²/4 + |b|²)
        let (a, d, b) = (rho.get(0, 0).re, rho.get(1, 1).re, rho.get(0, 1));
        let disc = ((a - d) * (a - d) / 4.0 + b.norm_sqr()).sqrt();
        let (l1, l2) = ((a + d) / 2.0 + disc, (a + d) / 2.0 - disc);
        assert!((0.0..=1.0).contains(&l1) && (0.0..=1.0).contains(&l2));
        assert!((l1 + l2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hs_examples() {
        let r0 = DensityMatrix::pure(&ket(1, 0), 0);
        let r1 = DensityMatrix::pure(&ket(1, 1), 1);
        let mixed = DensityMatrix::from_entries(
            2,
            vec![C::new(0.5, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.5, 0.0)],
            0,
        )
        .unwrap();
        assert_eq!(hs_distance(&r0, &r0).unwrap(), 0.0);
        assert_eq!(hs_distance(&r0, &r1).unwrap(), 2.0);
        assert_eq!(hs_distance(&r0, &mixed).unwrap(), 0.5);
        let big = DensityMatrix::pure(&ket(2, 0), 0);
        assert!(matches!(hs_distance(&r0, &big), Err(Error::DimensionMismatch(2, 4))));
    }

    #[test]
    fn pure_distance_identity_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut st = ClassStats::<f64>::new(1, 8);
            for _ in 0..5 {
                st.accumulate(&random_state(3, &mut rng), 0).unwrap();
            }
            let rho = st.finalize().unwrap().remove(0);
            let psi = random_state(3, &mut rng);
            let direct = hs_distance(&DensityMatrix::pure(&psi, 0), &rho).unwrap();
            let fast = hs_distance_to_pure(&psi, &rho).unwrap();
            assert!((direct - fast).abs() < 1e-10);
            let sym = hs_distance(&rho, &DensityMatrix::pure(&psi, 0)).unwrap();
            assert!((direct - sym).abs() < 1e-15);
        }
    }

    #[test]
    fn loss_examples() {
        let r0 = DensityMatrix::pure(&ket(1, 0), 0);
        let r1 = DensityMatrix::pure(&ket(1, 1), 1);
        assert_eq!(clustering_loss(&[r0.clone(), r0.clone(), r0.clone()]).unwrap(), 0.0);
        assert_eq!(clustering_loss(&[r0.clone(), r1]).unwrap(), -2.0);
        assert!(matches!(clustering_loss(&[r0]), Err(Error::TooFewClasses(1))));
    }

    #[test]
    fn loss_gradient_matches_finite_differences_in_states() {
        // Perturb one sample's amplitudes and compare with the cotangent.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 2;
        let states: Vec<_> = (0..6).map(|_| random_state(n, &mut rng)).collect();
        let labels = [0, 1, 2, 0, 1, 2];
        let loss_of = |states: &[StateVector<f64>]| {
            let mut st = ClassStats::new(3, 4);
            for (s, &y) in states.iter().zip(&labels) {
                st.accumulate(s, y).unwrap();
            }
            clustering_loss_grad(&st.finalize().unwrap(), 0.3).unwrap()
        };
        let lg = loss_of(&states);
        let target = 4;
        let g = state_cotangent(&lg.d_rho[labels[target]], &states[target], 2);
        let h = 1e-6;
        for b in 0..4 {
            for (part, dir) in [(0, C::new(h, 0.0)), (1, C::new(0.0, h))] {
                let mut plus = states.clone();
                plus[target].amps_mut()[b] += dir;
                let mut minus = states.clone();
                minus[target].amps_mut()[b] -= dir;
                let fd = (loss_of(&plus).loss - loss_of(&minus).loss) / (2.0 * h);
                let an = if part == 0 { g[b].re } else { g[b].im };
                assert!((fd - an).abs() < 1e-7, "b {b} part {part}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn classifier_examples() {
        let r0 = DensityMatrix::pure(&ket(1, 0), 0);
        let r1 = DensityMatrix::pure(&ket(1, 1), 1);
        assert_eq!(classify(&ket(1, 0), &[r0.clone(), r1.clone()]), 0);
        assert_eq!(classify(&ket(1, 1), &[r0.clone(), r1.clone()]), 1);
        let plus = StateVector::from_amps(
            1,
            vec![C::new(0.5f64.sqrt(), 0.0), C::new(0.5f64.sqrt(), 0.0)],
        )
        .unwrap();
        assert_eq!(classify(&plus, &[r1.clone(), r0.clone()]), 0);
        let fid = NearestCluster::new(vec![r1, r0], ClassifierMetric::Fidelity);
        assert_eq!(fid.classify(&ket(1, 0)), 1);
    }

    #[test]
    fn classify_matches_brute_force_and_ignores_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rhos: Vec<_> = (0..4)
            .map(|j| {
                let mut st = ClassStats::new(1, 8);
                for _ in 0..3 {
                    st.accumulate(&random_state(3, &mut rng), 0).unwrap();
                }
                let mut r = st.finalize().unwrap().remove(0);
                r.label = j;
                r
            })
            .collect();
        for _ in 0..50 {
            let psi = random_state(3, &mut rng);
            let brute: Vec<f64> = rhos
                .iter()
                .map(|r| hs_distance(&DensityMatrix::pure(&psi, 0), r).unwrap())
                .collect();
            let c = classify(&psi, &rhos);
            assert_eq!(c, argmin(&brute));
            assert_eq!(classify(&psi.clone().with_global_phase(0.77), &rhos), c);
        }
    }
}
