// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! The two dual `(n+1)`-parameter descriptions of a fully symmetrised
//! channel: error-weight probabilities `p` and Pauli eigenvalues `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `p[w]` is the total probability of weight-`w` Pauli errors.
///
/// Raw linear-inversion estimates may leave the simplex; use
/// [`WeightDistribution::nonphysical_entries`] to find them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightDistribution<T> {
    p: Vec<T>,
}

impl<T: Scalar> WeightDistribution<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument(
                "weight distribution needs at least one entry".into(),
            ));
        }
        Ok(Self { p })
    }

    /// Point mass on weight 0.
    pub fn identity(n: usize) -> Self {
        let mut p = vec![T::zero(); n + 1];
        p[0] = T::one();
        Self { p }
    }

    pub fn num_qubits(&self) -> usize {
        self.p.len() - 1
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<T> {
        self.p
    }

    pub fn get(&self, w: usize) -> &T {
        &self.p[w]
    }

    pub fn total(&self) -> T {
        self.p.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Weights whose entry falls outside `[-tol, 1 + tol]`.
    pub fn nonphysical_entries(&self, tol: f64) -> Vec<usize> {
        self.p
            .iter()
            .enumerate()
            .filter(|(_, v)| {
                let v = v.to_f64();
                v < -tol || v > 1.0 + tol
            })
            .map(|(w, _)| w)
            .collect()
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.nonphysical_entries(tol).is_empty() && (self.total().to_f64() - 1.0).abs() <= tol
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> WeightDistribution<U> {
        WeightDistribution {
            p: self.p.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> WeightDistribution<f64> {
        self.map(Scalar::to_f64)
    }
}

/// `c[w]` is the factor by which the symmetrised channel scales any
/// weight-`w` Pauli observable; `c[0] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigenvalueVector<T> {
    c: Vec<T>,
}

impl<T: Scalar> EigenvalueVector<T> {
    /// Checks `c[0] = 1` within `1e-12`.
    pub fn new(c: Vec<T>) -> Result<Self> {
        match c.first() {
            None => Err(Error::InvalidArgument("eigenvalue vector is empty".into())),
            Some(c0) if !c0.approx_eq(&T::one(), 1e-12) => Err(Error::InvalidArgument(format!(
                "c[0] must be 1, got {c0:?}"
            ))),
            Some(_) => Ok(Self { c }),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.c.len() - 1
    }

    pub fn as_slice(&self) -> &[T] {
        &self.c
    }

    pub fn into_vec(self) -> Vec<T> {
        self.c
    }

    pub fn get(&self, w: usize) -> &T {
        &self.c[w]
    }

    /// Even-parity probabilities `q = (1 + c) / 2`.
    pub fn even_parity_probabilities(&self) -> Vec<T> {
        let two = T::one() + T::one();
        self.c.iter().map(|c| (T::one() + c.clone()) / two.clone()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> EigenvalueVector<U> {
        EigenvalueVector {
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> EigenvalueVector<f64> {
        self.map(Scalar::to_f64)
    }

    /// Elementwise product, the eigenvalues of a composed channel.
    pub fn hadamard(&self, other: &Self) -> Result<Self> {
        Error::check_size(self.num_qubits(), other.num_qubits())?;
        Ok(Self {
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        })
    }

    pub fn powi(&self, m: u32) -> Self {
        Self {
            c: self
                .c
                .iter()
                .map(|c| (0..m).fold(T::one(), |acc, _| acc * c.clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn flags_out_of_range_entries() {
        let p = WeightDistribution::new(vec![1.02, -0.03, 0.01]).unwrap();
        assert_eq!(p.nonphysical_entries(1e-12), vec![0, 1]);
        assert!(!p.is_physical(1e-12));
        assert!(WeightDistribution::<f64>::identity(3).is_physical(0.0));
    }

    #[test]
    fn eigenvalue_vector_requires_unit_first_entry() {
        assert!(EigenvalueVector::new(vec![0.5, 0.2]).is_err());
        let c = EigenvalueVector::new(vec![ratio(1, 1), ratio(1, 3)]).unwrap();
        assert_eq!(c.even_parity_probabilities()[1], ratio(2, 3));
        let sq: EigenvalueVector<BigRational> = c.powi(2);
        assert_eq!(sq.get(1), &ratio(1, 9));
    }
}
