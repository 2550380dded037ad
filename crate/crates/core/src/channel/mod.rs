// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Noise channels: sparse Pauli channels, dense Kraus channels for small
//! registers, and the engineered fixtures.

mod fixtures;
mod kraus;

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::weights::WeightDistribution;

pub use fixtures::{engineered_channel, Fixture};
pub use kraus::{pauli_decompose, random_kraus_channel, KrausChannel, KrausValidation, MAX_KRAUS_QUBITS};

/// Tolerance on the total probability of a Pauli channel.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Terms below this may be dropped after composition.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Most total probability a channel may lose to pruning.
pub const PRUNE_BUDGET: f64 = 1e-14;

/// Compensated sum; plain summation of ~10^5 terms drifts by ~10^-12.
fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Drops the smallest terms below [`PRUNE_THRESHOLD`] while their total
/// stays within `budget`; returns the mass dropped.
fn prune(terms: &mut BTreeMap<PauliString, f64>, budget: f64) -> f64 {
    let mut small: Vec<(f64, PauliString)> = terms
        .iter()
        .filter(|(_, &a)| a < PRUNE_THRESHOLD)
        .map(|(k, &a)| (a, k.clone()))
        .collect();
    small.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let mut dropped = 0.0;
    for (a, k) in small {
        if dropped + a > budget {
            break;
        }
        dropped += a;
        terms.remove(&k);
    }
    dropped
}

/// `rho -> sum_i a_i P_i rho P_i`, keyed by sign-free Pauli strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    n: usize,
    terms: BTreeMap<PauliString, f64>,
    pruned_mass: f64,
}

impl PauliChannel {
    /// Builds a channel, merging keys that differ only in sign.
    pub fn new(n: usize, terms: impl IntoIterator<Item = (PauliString, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (p, a) in terms {
            Error::check_size(n, p.num_qubits())?;
            if !(-PROBABILITY_TOLERANCE..=1.0 + PROBABILITY_TOLERANCE).contains(&a) || a.is_nan() {
                return Err(Error::InvalidArgument(format!("probability {a} of {p} out of range")));
            }
            *map.entry(p.unsigned()).or_insert(0.0) += a.max(0.0);
        }
        map.retain(|_, a| *a > 0.0);
        let total = neumaier_sum(map.values().copied());
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "Pauli channel probabilities sum to {total}"
            )));
        }
        Ok(Self {
            n,
            terms: map,
            pruned_mass: 0.0,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::deterministic(PauliString::identity(n))
    }

    /// The unitary Pauli error `P` applied with certainty.
    pub fn deterministic(p: PauliString) -> Self {
        Self {
            n: p.num_qubits(),
            terms: BTreeMap::from([(p.unsigned(), 1.0)]),
            pruned_mass: 0.0,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<PauliString, f64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn probability(&self, p: &PauliString) -> f64 {
        self.terms.get(&p.unsigned()).copied().unwrap_or(0.0)
    }

    /// Mass removed by pruning during the composition that built this channel.
    pub fn pruned_mass(&self) -> f64 {
        self.pruned_mass
    }

    pub fn weight_distribution(&self) -> WeightDistribution<f64> {
        let mut p = vec![0.0; self.n + 1];
        for (term, a) in &self.terms {
            p[term.weight()] += a;
        }
        WeightDistribution::new(p).expect("n + 1 >= 1 entries")
    }

    /// Probability-weighted commutation sign with `observable`, i.e. the
    /// factor by which the channel scales that observable.
    pub fn eigenvalue(&self, observable: &PauliString) -> Result<f64> {
        Error::check_size(self.n, observable.num_qubits())?;
        let mut acc = 0.0;
        for (term, a) in &self.terms {
            acc += if term.commutes(observable)? { *a } else { -*a };
        }
        Ok(acc)
    }

    /// `self ∘ other`: probabilities convolve under Pauli multiplication.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Error::check_size(self.n, other.n)?;
        let mut out: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                *out.entry(p.mul_unsigned(q)?).or_insert(0.0) += a * b;
            }
        }
        Ok(Self::from_unpruned(self.n, out, self.pruned_mass + other.pruned_mass))
    }

    /// Composes `self` with itself `m` times (`m = 0` gives the identity).
    pub fn power(&self, m: u32) -> Result<Self> {
        let mut acc = Self::identity(self.n);
        for _ in 0..m {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    fn from_unpruned(n: usize, mut terms: BTreeMap<PauliString, f64>, prior_pruned: f64) -> Self {
        let pruned = prune(&mut terms, (PRUNE_BUDGET - prior_pruned).max(0.0));
        let total = neumaier_sum(terms.values().copied());
        for a in terms.values_mut() {
            *a /= total;
        }
        Self {
            n,
            terms,
            pruned_mass: prior_pruned + pruned,
        }
    }

    /// Cumulative table for drawing error terms.
    pub fn sampler(&self) -> PauliSampler<'_> {
        let mut cumulative = Vec::with_capacity(self.terms.len());
        let mut keys = Vec::with_capacity(self.terms.len());
        let mut acc = 0.0;
        for (p, a) in &self.terms {
            acc += a;
            cumulative.push(acc);
            keys.push(p);
        }
        PauliSampler { keys, cumulative }
    }
}

/// Draws Pauli terms with their channel probabilities.
#[derive(Debug, Clone)]
pub struct PauliSampler<'a> {
    keys: Vec<&'a PauliString>,
    cumulative: Vec<f64>,
}

impl<'a> PauliSampler<'a> {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a PauliString {
        let total = *self.cumulative.last().expect("channel has at least one term");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.keys[idx.min(self.keys.len() - 1)]
    }
}

/// Tensor product of single-qubit depolarizing channels
/// `(1 - p) rho + p/3 (X rho X + Y rho Y + Z rho Z)`.
pub fn depolarizing_product(per_qubit_p: &[f64]) -> Result<PauliChannel> {
    let n = per_qubit_p.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    if let Some(bad) = per_qubit_p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidArgument(format!("depolarizing probability {bad} out of range")));
    }
    let mut terms: BTreeMap<PauliString, f64> = BTreeMap::from([(PauliString::identity(n), 1.0)]);
    let mut pruned = 0.0;
    for (site, &p) in per_qubit_p.iter().enumerate() {
        let mut next = BTreeMap::new();
        for (term, a) in &terms {
            next.insert(term.clone(), a * (1.0 - p));
            for f in Pauli::NON_IDENTITY {
                let mut t = term.clone();
                t.set(site, f);
                next.insert(t, a * p / 3.0);
            }
        }
        pruned += prune(&mut next, (PRUNE_BUDGET - pruned).max(0.0));
        terms = next;
    }
    Ok(PauliChannel::from_unpruned(n, terms, pruned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_weights() {
        let p = PauliChannel::identity(3).weight_distribution();
        assert_eq!(p.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(PauliChannel::new(1, [(ps("X"), 0.5)]).is_err());
        assert!(PauliChannel::new(1, [(ps("X"), 1.5), (ps("I"), -0.5)]).is_err());
        assert!(PauliChannel::new(2, [(ps("X"), 1.0)]).is_err());
    }

    #[test]
    fn merges_signed_keys() {
        let ch = PauliChannel::new(1, [(ps("X"), 0.25), (ps("-X"), 0.25), (ps("I"), 0.5)]).unwrap();
        assert_eq!(ch.len(), 2);
        assert_eq!(ch.probability(&ps("X")), 0.5);
    }

    #[test]
    fn zz_weights() {
        let ch = PauliChannel::deterministic(ps("ZZ"));
        assert_eq!(ch.weight_distribution().as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn depolarizing_single_qubit() {
        let ch = depolarizing_product(&[0.3]).unwrap();
        assert!((ch.probability(&ps("I")) - 0.7).abs() < 1e-15);
        for s in ["X", "Y", "Z"] {
            assert!((ch.probability(&ps(s)) - 0.1).abs() < 1e-15);
        }
        assert!(depolarizing_product(&[1.2]).is_err());
        assert_eq!(depolarizing_product(&[0.0, 0.0]).unwrap(), PauliChannel::identity(2));
    }

    #[test]
    fn depolarizing_two_qubit_binomial() {
        let p = depolarizing_product(&[0.3, 0.3]).unwrap().weight_distribution();
        assert!(close(p.as_slice(), &[0.49, 0.42, 0.09], 1e-15));
    }

    #[test]
    fn depolarizing_weights_are_binomial() {
        let (n, q) = (6usize, 0.17);
        let p = depolarizing_product(&vec![q; n]).unwrap().weight_distribution();
        for w in 0..=n {
            let binom = crate::scalar::binomial(n, w).to_string().parse::<f64>().unwrap();
            let expected = binom * (1.0 - q).powi((n - w) as i32) * q.powi(w as i32);
            assert!((p.get(w) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn pruning_stays_within_budget() {
        let (n, q) = (8usize, 0.02);
        let ch = depolarizing_product(&vec![q; n]).unwrap();
        assert!(ch.pruned_mass() <= PRUNE_BUDGET);
        let p = ch.weight_distribution();
        for w in 0..=n {
            let binom = crate::scalar::binomial(n, w).to_string().parse::<f64>().unwrap();
            let expected = binom * (1.0 - q).powi((n - w) as i32) * q.powi(w as i32);
            assert!((p.get(w) - expected).abs() < 1e-13, "w = {w}");
        }
    }

    #[test]
    fn compose_basics() {
        let b = depolarizing_product(&[0.2, 0.1]).unwrap();
        assert_eq!(PauliChannel::identity(2).compose(&b).unwrap(), b);
        let z = PauliChannel::deterministic(ps("Z"));
        assert_eq!(z.compose(&z).unwrap(), PauliChannel::identity(1));
        assert!(z.compose(&b).is_err());
    }

    #[test]
    fn composed_depolarizing_multiplies_eigenvalues() {
        let d = depolarizing_product(&[0.3]).unwrap();
        let dd = d.compose(&d).unwrap();
        // c1 = 1 - 4p/3 = 0.6 for each factor, 0.36 for the composition.
        assert!((dd.eigenvalue(&ps("Z")).unwrap() - 0.36).abs() < 1e-15);
        let expected = depolarizing_product(&[0.48]).unwrap();
        for (k, v) in expected.terms() {
            assert!((dd.probability(k) - v).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_prunes_tiny_terms() {
        let a = PauliChannel::new(1, [(ps("I"), 1.0 - 1e-16), (ps("X"), 1e-16)]).unwrap();
        let c = a.compose(&PauliChannel::identity(1)).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c.pruned_mass() > 0.0);
        assert!((c.terms().values().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampler_frequencies() {
        let ch = depolarizing_product(&[0.3]).unwrap();
        let s = ch.sampler();
        let mut rng = crate::rng::seeded(3);
        let draws = 200_000;
        let ids = (0..draws).filter(|_| s.sample(&mut rng).is_identity()).count();
        assert!((ids as f64 / draws as f64 - 0.7).abs() < 0.005);
    }

    fn random_channel(seed: u64, n: usize, terms: usize) -> PauliChannel {
        let mut rng = crate::rng::seeded(seed);
        let mut raw: Vec<(PauliString, f64)> = (0..terms)
            .map(|_| {
                let mut p = PauliString::identity(n);
                for s in 0..n {
                    p.set(s, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]);
                }
                (p, rng.random::<f64>() + 0.01)
            })
            .collect();
        let total: f64 = raw.iter().map(|t| t.1).sum();
        for t in &mut raw {
            t.1 /= total;
        }
        PauliChannel::new(n, raw).unwrap()
    }

    proptest! {
        #[test]
        fn compose_is_associative(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
            let (a, b, c) = (random_channel(s1, 3, 5), random_channel(s2, 3, 4), random_channel(s3, 3, 3));
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(left.len(), right.len());
            for (k, v) in left.terms() {
                prop_assert!((right.probability(k) - v).abs() < 1e-14);
            }
        }

        #[test]
        fn eigenvalues_multiply_under_composition(s1 in any::<u64>(), s2 in any::<u64>()) {
            let (a, b) = (random_channel(s1, 3, 6), random_channel(s2, 3, 6));
            let ab = a.compose(&b).unwrap();
            for obs in PauliString::all(3) {
                let lhs = ab.eigenvalue(&obs).unwrap();
                let rhs = a.eigenvalue(&obs).unwrap() * b.eigenvalue(&obs).unwrap();
                prop_assert!((lhs - rhs).abs() < 1e-13);
            }
        }
    }
}
