// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::PauliChannel;
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Dense channels are limited to this many qubits.
pub const MAX_KRAUS_QUBITS: usize = 6;

/// Trace-preservation tolerance for [`KrausChannel::validate`].
pub const TRACE_PRESERVING_TOLERANCE: f64 = 1e-10;

/// `rho -> sum_k A_k rho A_k^dag` on `n <= 6` qubits.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    n: usize,
    operators: Vec<CMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausValidation {
    /// Largest entry of `|sum_k A_k^dag A_k - I|`.
    pub deviation: f64,
    pub pass: bool,
}

impl KrausChannel {
    /// Checks shapes only; see [`KrausChannel::validate`] for trace preservation.
    pub fn new(n: usize, operators: Vec<CMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("need at least one qubit".into()));
        }
        if n > MAX_KRAUS_QUBITS {
            return Err(Error::TooLarge {
                what: "KrausChannel",
                n,
                max: MAX_KRAUS_QUBITS,
            });
        }
        if operators.is_empty() {
            return Err(Error::InvalidArgument("need at least one Kraus operator".into()));
        }
        let d = 1usize << n;
        if let Some(bad) = operators.iter().find(|a| a.shape() != (d, d)) {
            return Err(Error::InvalidArgument(format!(
                "Kraus operator has shape {:?}, expected ({d}, {d})",
                bad.shape()
            )));
        }
        Ok(Self { n, operators })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, vec![CMatrix::identity(1 << n, 1 << n)])
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn validate(&self) -> KrausValidation {
        let d = self.dim();
        let sum = self
            .operators
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, a| acc + a.adjoint() * a);
        let deviation = (sum - CMatrix::identity(d, d))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        KrausValidation {
            deviation,
            pass: deviation <= TRACE_PRESERVING_TOLERANCE,
        }
    }

    /// Applies the channel to a density matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, a| acc + a * rho * a.adjoint())
    }

    /// The channel applying `self` and then `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Error::check_size(self.n, other.n)?;
        let ops = other
            .operators
            .iter()
            .flat_map(|b| self.operators.iter().map(move |a| b * a))
            .collect();
        Self::new(self.n, ops)
    }
}

/// `Tr(A P)` using the monomial structure of `P`.
fn trace_with_pauli(a: &CMatrix, p: &PauliString) -> Complex64 {
    let n = p.num_qubits();
    let mut xm = 0usize;
    let mut zm = 0usize;
    let mut ys = 0u32;
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        let f = p.get(q);
        if f.x_bit() {
            xm |= bit;
        }
        if f.z_bit() {
            zm |= bit;
        }
        if f == Pauli::Y {
            ys += 1;
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..(1usize << n) {
        let v = a[(j, j ^ xm)];
        if (j & zm).count_ones() % 2 == 1 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    acc *= Complex64::i().powu(ys);
    if p.is_negative() {
        -acc
    } else {
        acc
    }
}

/// Pauli-twirled form of `channel`: `a_i = sum_k |Tr(A_k P_i)|^2 / D^2`.
pub fn pauli_decompose(channel: &KrausChannel) -> Result<PauliChannel> {
    let check = channel.validate();
    if !check.pass {
        return Err(Error::NotTracePreserving {
            deviation: check.deviation,
        });
    }
    let d2 = (channel.dim() * channel.dim()) as f64;
    let mut terms = Vec::new();
    for p in PauliString::all(channel.n) {
        let a: f64 = channel
            .operators
            .iter()
            .map(|op| trace_with_pauli(op, &p).norm_sqr())
            .sum::<f64>()
            / d2;
        if a > 0.0 {
            terms.push((p, a));
        }
    }
    // Round-off can leave the total a few ulps from one.
    let total: f64 = terms.iter().map(|t| t.1).sum();
    for t in &mut terms {
        t.1 /= total;
    }
    PauliChannel::new(channel.n, terms)
}

/// Random channel from a random unitary on system plus a `num_kraus`-level
/// ancilla: `A_k = (I ⊗ <k|) U (I ⊗ |0>)`.
pub fn random_kraus_channel<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    num_kraus: usize,
) -> Result<KrausChannel> {
    if num_kraus == 0 {
        return Err(Error::InvalidArgument("need at least one Kraus operator".into()));
    }
    let d = 1usize << n;
    let big = d * num_kraus;
    let g = CMatrix::from_fn(big, big, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let u = g.qr().q();
    let ops = (0..num_kraus)
        .map(|k| CMatrix::from_fn(d, d, |r, c| u[(r * num_kraus + k, c * num_kraus)]))
        .collect();
    KrausChannel::new(n, ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::pauli_matrix;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn monomial_trace_matches_dense_trace() {
        let mut rng = crate::rng::seeded(11);
        let ch = random_kraus_channel(&mut rng, 2, 3).unwrap();
        for p in PauliString::all(2) {
            for a in ch.operators() {
                let dense = (a * pauli_matrix(&p)).trace();
                assert!((dense - trace_with_pauli(a, &p)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn validation_reports_deviation() {
        let id = KrausChannel::identity(1).unwrap();
        assert_eq!(id.validate().deviation, 0.0);
        let z = pauli_matrix(&ps("Z"));
        let half = KrausChannel::new(
            1,
            vec![z.clone() * Complex64::new(0.5f64.sqrt(), 0.0), z.clone() * Complex64::new(0.5f64.sqrt(), 0.0)],
        )
        .unwrap();
        assert!(half.validate().pass);
        let shrunk = KrausChannel::new(1, vec![z * Complex64::new(0.9, 0.0)]).unwrap();
        let v = shrunk.validate();
        assert!(!v.pass);
        assert!((v.deviation - 0.19).abs() < 1e-12);
        assert!(matches!(pauli_decompose(&shrunk), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn size_limits() {
        assert!(matches!(KrausChannel::identity(7), Err(Error::TooLarge { .. })));
        assert!(KrausChannel::new(1, vec![CMatrix::identity(4, 4)]).is_err());
    }

    #[test]
    fn identity_decomposes_to_identity() {
        let ch = pauli_decompose(&KrausChannel::identity(2).unwrap()).unwrap();
        assert_eq!(ch, PauliChannel::identity(2));
    }

    #[test]
    fn random_channels_are_trace_preserving_and_decompose_to_unit_mass() {
        let mut rng = crate::rng::seeded(5);
        for n in 1..=3 {
            for r in 1..=4 {
                let ch = random_kraus_channel(&mut rng, n, r).unwrap();
                assert!(ch.validate().pass);
                let total: f64 = pauli_decompose(&ch).unwrap().terms().values().sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = crate::rng::seeded(12);
        let a = random_kraus_channel(&mut rng, 2, 2).unwrap();
        let b = random_kraus_channel(&mut rng, 2, 3).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.operators().len(), 6);
        assert!(ab.validate().pass);
        let rho = crate::dense::pauli_matrix(&"XI".parse().unwrap()) * Complex64::new(0.25, 0.0)
            + CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0);
        let diff = ab.apply(&rho) - b.apply(&a.apply(&rho));
        assert!(diff.iter().all(|z| z.norm() < 1e-12));
    }
}
