// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! The Clifford-layer twirl: analytic collapse of a Pauli channel, a
//! brute-force dense oracle, and Monte Carlo simulation of the protocol.

mod record;
mod simulate;

use std::collections::BTreeMap;

use crate::channel::{KrausChannel, PauliChannel};
use crate::dense::{layer_unitary, pauli_matrix};
use crate::error::{Error, Result};
use crate::pauli::{CliffordLayer, PauliString, CLIFFORD_COUNT};
use crate::weights::WeightDistribution;

pub use record::{Bits, InputKind, Outcome, TrialRecord};
pub use simulate::{
    reference_run, simulate, simulate_ensemble, simulate_standard, NoiseChannel, ProtocolConfig,
    SpamModel, Variant,
};

/// Result of the analytic twirl.
#[derive(Debug, Clone, PartialEq)]
pub struct TwirlResult {
    /// `r[support]`: mean term probability over the `3^w` Pauli types on
    /// that set of sites (keyed by ascending site list).
    pub per_location: BTreeMap<Vec<usize>, f64>,
    pub p: WeightDistribution<f64>,
}

/// Averages each support pattern over its `3^w` type assignments.
pub fn exact_twirl(channel: &PauliChannel) -> TwirlResult {
    let mut sums: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (term, a) in channel.terms() {
        *sums.entry(term.support()).or_insert(0.0) += a;
    }
    let mut p = vec![0.0; channel.num_qubits() + 1];
    let per_location = sums
        .into_iter()
        .map(|(support, total)| {
            let w = support.len();
            let r = total / 3f64.powi(w as i32);
            p[w] += 3f64.powi(w as i32) * r;
            (support, r)
        })
        .collect();
    TwirlResult {
        per_location,
        p: WeightDistribution::new(p).expect("n + 1 >= 1 entries"),
    }
}

/// Largest register the brute-force oracle enumerates (`24^2 = 576` layers).
pub const BRUTEFORCE_MAX_QUBITS: usize = 2;

/// Enumerates every Clifford layer, conjugates the dense channel by it,
/// averages the Pauli-transfer diagonal, and converts that to weight
/// probabilities through the Walsh transform `a_Q = 4^-n sum_P s(P,Q) λ_P`.
///
/// Shares no code with [`exact_twirl`] or the Kraus-to-Pauli decomposition.
pub fn exact_twirl_bruteforce(channel: &KrausChannel) -> Result<WeightDistribution<f64>> {
    let n = channel.num_qubits();
    if n > BRUTEFORCE_MAX_QUBITS {
        return Err(Error::TooLarge {
            what: "exact_twirl_bruteforce",
            n,
            max: BRUTEFORCE_MAX_QUBITS,
        });
    }
    let paulis: Vec<PauliString> = PauliString::all(n).collect();
    let mats: Vec<_> = paulis.iter().map(pauli_matrix).collect();
    let d = channel.dim() as f64;
    let layers = CLIFFORD_COUNT.pow(n as u32);
    let mut diag = vec![0.0; paulis.len()];
    for code in 0..layers {
        let ids: Vec<u8> = (0..n)
            .map(|s| ((code / CLIFFORD_COUNT.pow(s as u32)) % CLIFFORD_COUNT) as u8)
            .collect();
        let u = layer_unitary(&CliffordLayer::new(ids)?);
        let ud = u.adjoint();
        for (k, pm) in mats.iter().enumerate() {
            // Tr(P C^dag Λ(C P C^dag) C) / D
            let out = &ud * channel.apply(&(&u * pm * &ud)) * &u;
            diag[k] += (pm * out).trace().re / d;
        }
    }
    for v in &mut diag {
        *v /= layers as f64;
    }
    let norm = 4f64.powi(n as i32);
    let mut p = vec![0.0; n + 1];
    for q in &paulis {
        let mut a = 0.0;
        for (pk, lambda) in paulis.iter().zip(&diag) {
            a += if pk.commutes(q)? { *lambda } else { -*lambda };
        }
        p[q.weight()] += a / norm;
    }
    WeightDistribution::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{engineered_channel, pauli_decompose, random_kraus_channel};
    use crate::dense::single_pauli;
    use crate::pauli::Pauli;
    use rand::Rng;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_twirl() {
        let t = exact_twirl(&PauliChannel::identity(3));
        assert_eq!(t.p.as_slice(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.per_location.len(), 1);
        assert_eq!(t.per_location[&vec![]], 1.0);
    }

    #[test]
    fn unitary_fixture_twirl() {
        let ch = pauli_decompose(&engineered_channel("chcl3_unitary").unwrap()).unwrap();
        let t = exact_twirl(&ch);
        assert!(close(t.p.as_slice(), &[0.25, 0.5, 0.25], 1e-12));
        // Each single-site location carries 1/4 spread over 3 types.
        assert!((t.per_location[&vec![0]] - 0.25 / 3.0).abs() < 1e-15);
        assert!((t.per_location[&vec![0, 1]] - 0.25 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn twirl_preserves_weight_distribution() {
        let mut rng = crate::rng::seeded(1);
        for _ in 0..10 {
            let k = random_kraus_channel(&mut rng, 3, 2).unwrap();
            let ch = pauli_decompose(&k).unwrap();
            let t = exact_twirl(&ch);
            assert!(close(t.p.as_slice(), ch.weight_distribution().as_slice(), 1e-15));
        }
    }

    #[test]
    fn bruteforce_simple_cases() {
        let id = exact_twirl_bruteforce(&KrausChannel::identity(1).unwrap()).unwrap();
        assert!(close(id.as_slice(), &[1.0, 0.0], 1e-12));
        let z = KrausChannel::new(1, vec![single_pauli(Pauli::Z)]).unwrap();
        let pz = exact_twirl_bruteforce(&z).unwrap();
        assert!(close(pz.as_slice(), &[0.0, 1.0], 1e-12));
        assert!(matches!(
            exact_twirl_bruteforce(&engineered_channel("malonic_z_mix").unwrap()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn bruteforce_matches_analytic_on_random_channels() {
        let mut rng = crate::rng::seeded(77);
        for n in 1..=2 {
            for _ in 0..3 {
                let r = rng.random_range(1..=4);
                let k = random_kraus_channel(&mut rng, n, r).unwrap();
                let analytic = exact_twirl(&pauli_decompose(&k).unwrap()).p;
                let brute = exact_twirl_bruteforce(&k).unwrap();
                assert!(close(analytic.as_slice(), brute.as_slice(), 1e-10));
            }
        }
    }
}
