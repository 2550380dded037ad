// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo simulation of the protocol.
//!
//! Circuit order is: prepare, apply the Clifford layer `C`, the noise,
//! then `C^dag`, and measure. For Pauli channels the state is never built:
//! a sampled error `P` becomes `C^dag P C` and flips exactly the sites where
//! it has an `X` component. Kraus channels are evolved as dense density
//! matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::record::{Bits, InputKind, Outcome, TrialRecord};
use crate::channel::{pauli_decompose, KrausChannel, PauliChannel, PauliSampler};
use crate::dense::layer_unitary;
use crate::error::{Error, Result};
use crate::pauli::{sample_clifford_layer, CliffordLayer, PauliString, QubitPermutation};
use crate::rng;

#[derive(Debug, Clone)]
pub enum NoiseChannel {
    Pauli(PauliChannel),
    Kraus(KrausChannel),
}

impl NoiseChannel {
    pub fn num_qubits(&self) -> usize {
        match self {
            NoiseChannel::Pauli(p) => p.num_qubits(),
            NoiseChannel::Kraus(k) => k.num_qubits(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Ensemble,
}

/// Independent classical bit flips at preparation and readout, per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamModel {
    pub prep: Vec<f64>,
    pub meas: Vec<f64>,
}

impl SpamModel {
    pub fn uniform(n: usize, prep: f64, meas: f64) -> Self {
        Self {
            prep: vec![prep; n],
            meas: vec![meas; n],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        Error::check_size(n, self.prep.len())?;
        Error::check_size(n, self.meas.len())?;
        if let Some(bad) = self
            .prep
            .iter()
            .chain(&self.meas)
            .find(|p| !(0.0..0.5).contains(*p))
        {
            return Err(Error::InvalidArgument(format!("SPAM flip probability {bad} not in [0, 1/2)")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub channel: NoiseChannel,
    pub variant: Variant,
    /// Trials per input configuration.
    pub trials: usize,
    pub master_seed: u64,
    pub spam: Option<SpamModel>,
}

impl ProtocolConfig {
    pub fn new(channel: NoiseChannel, variant: Variant, trials: usize, master_seed: u64) -> Self {
        Self {
            channel,
            variant,
            trials,
            master_seed,
            spam: None,
        }
    }

    pub fn with_spam(mut self, spam: SpamModel) -> Self {
        self.spam = Some(spam);
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.channel.num_qubits()
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("need at least one trial".into()));
        }
        if let Some(spam) = &self.spam {
            spam.validate(self.num_qubits())?;
        }
        Ok(())
    }
}

const REFERENCE_BIT: u64 = 1 << 63;
const WEIGHT_SHIFT: u32 = 48;

/// Stream id: bit 63 marks reference runs, bits 48..63 carry `w'`, the low
/// 48 bits the trial index.
fn stream_id(trial: u64, w: usize, reference: bool) -> u64 {
    let mut id = trial | ((w as u64) << WEIGHT_SHIFT);
    if reference {
        id |= REFERENCE_BIT;
    }
    id
}

enum Prepared<'a> {
    Pauli(PauliSampler<'a>),
    Kraus(&'a KrausChannel),
    Identity,
}

fn flips<R: Rng + ?Sized>(rng: &mut R, probs: Option<&[f64]>, n: usize) -> Vec<bool> {
    match probs {
        Some(p) => p.iter().map(|&q| q > 0.0 && rng.random_bool(q)).collect(),
        None => vec![false; n],
    }
}

fn standard_trial(
    cfg: &ProtocolConfig,
    noise: &Prepared<'_>,
    t: u64,
    reference: bool,
) -> Result<TrialRecord> {
    let n = cfg.num_qubits();
    let mut rng = rng::stream(cfg.master_seed, stream_id(t, 0, reference));
    let layer = sample_clifford_layer(&mut rng, n);
    let prep = flips(&mut rng, cfg.spam.as_ref().map(|s| s.prep.as_slice()), n);
    let mut bits = match noise {
        Prepared::Identity => prep,
        Prepared::Pauli(sampler) => {
            let err = sampler.sample(&mut rng);
            let frame = layer.inverse().conjugate(err)?;
            (0..n).map(|q| prep[q] ^ frame.x_bit(q)).collect()
        }
        Prepared::Kraus(k) => dense_outcome(k, &layer, &prep, &mut rng),
    };
    let meas = flips(&mut rng, cfg.spam.as_ref().map(|s| s.meas.as_slice()), n);
    for (b, m) in bits.iter_mut().zip(meas) {
        *b ^= m;
    }
    Ok(TrialRecord {
        trial_index: t,
        clifford_ids: layer.ids().to_vec(),
        permutation: None,
        input: InputKind::ZeroState,
        outcome: Outcome::Bits(Bits::new(bits)),
        is_reference: reference,
    })
}

/// Born-rule sample of `C^dag Λ(C |b><b| C^dag) C` in the computational basis.
fn dense_outcome<R: Rng + ?Sized>(
    channel: &KrausChannel,
    layer: &CliffordLayer,
    prep: &[bool],
    rng: &mut R,
) -> Vec<bool> {
    let n = prep.len();
    let d = 1usize << n;
    let index = prep
        .iter()
        .enumerate()
        .fold(0usize, |acc, (q, &b)| acc | (usize::from(b) << (n - 1 - q)));
    let mut rho = DMatrix::<Complex64>::zeros(d, d);
    rho[(index, index)] = Complex64::new(1.0, 0.0);
    let u = layer_unitary(layer);
    let ud = u.adjoint();
    let out = &ud * channel.apply(&(&u * rho * &ud)) * &u;
    let total: f64 = (0..d).map(|j| out[(j, j)].re.max(0.0)).sum();
    let mut r = rng.random::<f64>() * total;
    let mut outcome = d - 1;
    for j in 0..d {
        r -= out[(j, j)].re.max(0.0);
        if r < 0.0 {
            outcome = j;
            break;
        }
    }
    (0..n).map(|q| (outcome >> (n - 1 - q)) & 1 == 1).collect()
}

fn ensemble_trial(
    cfg: &ProtocolConfig,
    sampler: Option<&PauliSampler<'_>>,
    w: usize,
    t: u64,
    reference: bool,
) -> Result<TrialRecord> {
    let n = cfg.num_qubits();
    let mut rng = rng::stream(cfg.master_seed, stream_id(t, w, reference));
    let pi = QubitPermutation::random(&mut rng, n);
    let layer = sample_clifford_layer(&mut rng, n);
    let observable = pi.apply(&PauliString::z_on(n, 0..w))?;
    let mut sign: i8 = 1;
    if let Some(s) = sampler {
        let frame = layer.inverse().conjugate(s.sample(&mut rng))?;
        if !frame.commutes(&observable)? {
            sign = -sign;
        }
    }
    if let Some(spam) = &cfg.spam {
        let support = observable.support();
        for probs in [&spam.prep, &spam.meas] {
            for &q in &support {
                if probs[q] > 0.0 && rng.random_bool(probs[q]) {
                    sign = -sign;
                }
            }
        }
    }
    Ok(TrialRecord {
        trial_index: t,
        clifford_ids: layer.ids().to_vec(),
        permutation: Some(pi.mapping().to_vec()),
        input: InputKind::ZWeight(w),
        outcome: Outcome::Sign(sign),
        is_reference: reference,
    })
}

fn run_standard(cfg: &ProtocolConfig, reference: bool) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let noise = if reference {
        Prepared::Identity
    } else {
        match &cfg.channel {
            NoiseChannel::Pauli(p) => Prepared::Pauli(p.sampler()),
            NoiseChannel::Kraus(k) => Prepared::Kraus(k),
        }
    };
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| standard_trial(cfg, &noise, t, reference))
        .collect()
}

fn run_ensemble(cfg: &ProtocolConfig, w: usize, reference: bool) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let n = cfg.num_qubits();
    if !(1..=n).contains(&w) {
        return Err(Error::InvalidArgument(format!("w' = {w} must lie in 1..={n}")));
    }
    // The twirled statistics depend only on the Pauli diagonal, so a Kraus
    // channel is replaced by its Pauli decomposition here.
    let decomposed;
    let pauli = match &cfg.channel {
        NoiseChannel::Pauli(p) => p,
        NoiseChannel::Kraus(k) => {
            decomposed = pauli_decompose(k)?;
            &decomposed
        }
    };
    let sampler = (!reference).then(|| pauli.sampler());
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| ensemble_trial(cfg, sampler.as_ref(), w, t, reference))
        .collect()
}

/// Standard protocol: `|0...0>` input, full bitstring readout.
pub fn simulate_standard(cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    run_standard(cfg, false)
}

/// Ensemble protocol for one input weight `w'`, with permutations drawn
/// uniformly from the full symmetric group. Kraus channels are simulated
/// through their Pauli decomposition.
pub fn simulate_ensemble(cfg: &ProtocolConfig, w: usize) -> Result<Vec<TrialRecord>> {
    run_ensemble(cfg, w, false)
}

/// Runs `cfg.variant`; the ensemble variant covers every `w' = 1..=n`.
pub fn simulate(cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    run(cfg, false)
}

/// Same pipeline with the noise replaced by the identity (SPAM still applies).
pub fn reference_run(cfg: &ProtocolConfig) -> Result<Vec<TrialRecord>> {
    run(cfg, true)
}

fn run(cfg: &ProtocolConfig, reference: bool) -> Result<Vec<TrialRecord>> {
    match cfg.variant {
        Variant::Standard => run_standard(cfg, reference),
        Variant::Ensemble => {
            let mut out = Vec::with_capacity(cfg.trials * cfg.num_qubits());
            for w in 1..=cfg.num_qubits() {
                out.extend(run_ensemble(cfg, w, reference)?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{depolarizing_product, engineered_channel};

    fn pauli_cfg(ch: PauliChannel, variant: Variant, trials: usize, seed: u64) -> ProtocolConfig {
        ProtocolConfig::new(NoiseChannel::Pauli(ch), variant, trials, seed)
    }

    fn bits(r: &TrialRecord) -> &Bits {
        match &r.outcome {
            Outcome::Bits(b) => b,
            Outcome::Sign(_) => panic!("expected bits"),
        }
    }

    fn sign(r: &TrialRecord) -> f64 {
        match r.outcome {
            Outcome::Sign(s) => f64::from(s),
            Outcome::Bits(_) => panic!("expected sign"),
        }
    }

    #[test]
    fn identity_gives_all_zero_bitstrings() {
        let cfg = pauli_cfg(PauliChannel::identity(3), Variant::Standard, 500, 1);
        for r in simulate_standard(&cfg).unwrap() {
            assert_eq!(bits(&r).hamming_weight(), 0);
            r.validate().unwrap();
        }
    }

    #[test]
    fn twirled_x_flips_two_thirds_of_the_time() {
        let ch = PauliChannel::deterministic("XI".parse().unwrap());
        let k = 60_000;
        let cfg = pauli_cfg(ch, Variant::Standard, k, 2);
        let recs = simulate_standard(&cfg).unwrap();
        let flips = recs.iter().filter(|r| bits(r).get(0)).count() as f64 / k as f64;
        let se = (2.0 / 9.0 / k as f64).sqrt();
        assert!((flips - 2.0 / 3.0).abs() < 4.0 * se, "{flips}");
        assert!(recs.iter().all(|r| !bits(r).get(1)));
    }

    #[test]
    fn kraus_and_pauli_paths_agree_statistically() {
        // Twirled {ZZ}: both bits flip independently with probability 2/3.
        let k = 20_000;
        let kraus = ProtocolConfig::new(
            NoiseChannel::Kraus(engineered_channel("chcl3_zz").unwrap()),
            Variant::Standard,
            k,
            3,
        );
        let recs = simulate_standard(&kraus).unwrap();
        let both = recs.iter().filter(|r| bits(r).hamming_weight() == 2).count() as f64 / k as f64;
        assert!((both - 4.0 / 9.0).abs() < 4.0 * (0.25 / k as f64).sqrt(), "{both}");
    }

    #[test]
    fn determinism_and_thread_independence() {
        let ch = depolarizing_product(&[0.1, 0.2, 0.3]).unwrap();
        let cfg = pauli_cfg(ch, Variant::Standard, 2000, 9).with_spam(SpamModel::uniform(3, 0.02, 0.03));
        let a = simulate(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate(&cfg).unwrap());
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.master_seed = 10;
        assert_ne!(a, simulate(&other).unwrap());
    }

    #[test]
    fn ensemble_identity_is_all_plus_one() {
        let cfg = pauli_cfg(PauliChannel::identity(3), Variant::Ensemble, 100, 4);
        let recs = simulate(&cfg).unwrap();
        assert_eq!(recs.len(), 300);
        assert!(recs.iter().all(|r| sign(r) == 1.0));
        for r in &recs {
            r.validate().unwrap();
        }
    }

    #[test]
    fn ensemble_single_qubit_depolarizing() {
        let k = 100_000;
        let cfg = pauli_cfg(depolarizing_product(&[0.3]).unwrap(), Variant::Ensemble, k, 5);
        let recs = simulate_ensemble(&cfg, 1).unwrap();
        let mean = recs.iter().map(sign).sum::<f64>() / k as f64;
        let se = ((1.0 - 0.36) / k as f64).sqrt();
        assert!((mean - 0.6).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn ensemble_zz_weight_two() {
        let k = 100_000;
        let cfg = pauli_cfg(PauliChannel::deterministic("ZZ".parse().unwrap()), Variant::Ensemble, k, 6);
        let recs = simulate_ensemble(&cfg, 2).unwrap();
        let mean = recs.iter().map(sign).sum::<f64>() / k as f64;
        let se = ((1.0 - 1.0 / 81.0) / k as f64).sqrt();
        assert!((mean - 1.0 / 9.0).abs() < 4.0 * se, "{mean}");
    }

    #[test]
    fn ensemble_argument_errors() {
        let cfg = pauli_cfg(PauliChannel::identity(2), Variant::Ensemble, 10, 0);
        assert!(simulate_ensemble(&cfg, 0).is_err());
        assert!(simulate_ensemble(&cfg, 3).is_err());
        let zero = pauli_cfg(PauliChannel::identity(2), Variant::Standard, 0, 0);
        assert!(simulate(&zero).is_err());
    }

    #[test]
    fn ensemble_accepts_kraus_channels() {
        let kraus = ProtocolConfig::new(
            NoiseChannel::Kraus(engineered_channel("chcl3_zz").unwrap()),
            Variant::Ensemble,
            20_000,
            11,
        );
        let recs = simulate_ensemble(&kraus, 1).unwrap();
        let mean = recs.iter().map(sign).sum::<f64>() / recs.len() as f64;
        // c_1 of a weight-2 error on two qubits is -1/3.
        assert!((mean + 1.0 / 3.0).abs() < 4.0 * (1.0f64 / 20_000.0).sqrt(), "{mean}");
    }

    #[test]
    fn reference_run_without_spam_is_perfect() {
        let cfg = pauli_cfg(depolarizing_product(&[0.4, 0.4]).unwrap(), Variant::Standard, 200, 7);
        let recs = reference_run(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.is_reference && bits(r).hamming_weight() == 0));
    }

    #[test]
    fn reference_spam_contrast() {
        // Independent flips: <Z> = (1 - 2 e_prep)(1 - 2 e_meas).
        let k = 200_000;
        for (prep, meas, expected) in [(0.0, 0.05, 0.9), (0.05, 0.05, 0.81)] {
            let cfg = pauli_cfg(PauliChannel::identity(1), Variant::Standard, k, 8)
                .with_spam(SpamModel::uniform(1, prep, meas));
            let recs = reference_run(&cfg).unwrap();
            let z = recs
                .iter()
                .map(|r| if bits(r).get(0) { -1.0 } else { 1.0 })
                .sum::<f64>()
                / k as f64;
            let se = ((1.0 - expected * expected) / k as f64).sqrt();
            assert!((z - expected).abs() < 4.0 * se, "{z} vs {expected}");
        }
    }

    #[test]
    fn spam_model_is_validated() {
        let cfg = pauli_cfg(PauliChannel::identity(1), Variant::Standard, 10, 0)
            .with_spam(SpamModel::uniform(1, 0.5, 0.0));
        assert!(simulate(&cfg).is_err());
        let cfg = pauli_cfg(PauliChannel::identity(2), Variant::Standard, 10, 0)
            .with_spam(SpamModel::uniform(1, 0.1, 0.0));
        assert!(simulate(&cfg).is_err());
    }
}
