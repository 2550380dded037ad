// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::Rng;

use super::PauliString;
use crate::error::{Error, Result};

/// Bijection on site indices; the factor at site `j` moves to `mapping[j]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitPermutation {
    mapping: Vec<usize>,
}

impl QubitPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidArgument(format!(
                    "{mapping:?} is not a permutation of 0..{n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    /// Uniform over the full symmetric group.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(rng);
        Self { mapping }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (j, &m) in self.mapping.iter().enumerate() {
            inv[m] = j;
        }
        Self { mapping: inv }
    }

    pub fn apply(&self, p: &PauliString) -> Result<PauliString> {
        Error::check_size(self.len(), p.num_qubits())?;
        let mut out = PauliString::identity(p.num_qubits());
        for j in p.support() {
            out.set(self.mapping[j], p.get(j));
        }
        Ok(if p.is_negative() { out.negated() } else { out })
    }

    /// Image of a site set.
    pub fn apply_sites(&self, sites: &[usize]) -> Vec<usize> {
        sites.iter().map(|&s| self.mapping[s]).collect()
    }
}

/// `π P π^dag`.
pub fn permute(pi: &QubitPermutation, p: &PauliString) -> Result<PauliString> {
    pi.apply(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn swap_relabels() {
        let pi = QubitPermutation::new(vec![1, 0, 2]).unwrap();
        let p: PauliString = "XZI".parse().unwrap();
        assert_eq!(pi.apply(&p).unwrap().to_string(), "ZXI");
        assert_eq!(QubitPermutation::identity(3).apply(&p).unwrap(), p);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(QubitPermutation::new(vec![0, 0]).is_err());
        assert!(QubitPermutation::new(vec![0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn weight_is_invariant(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = crate::rng::seeded(seed);
            let pi = QubitPermutation::random(&mut rng, n);
            let mut p = PauliString::identity(n);
            for s in 0..n {
                p.set(s, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]);
            }
            let q = pi.apply(&p).unwrap();
            prop_assert_eq!(q.weight(), p.weight());
            prop_assert_eq!(pi.inverse().apply(&q).unwrap(), p);
        }
    }
}
