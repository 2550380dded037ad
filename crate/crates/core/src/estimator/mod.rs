// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Recovery of `c` and `p` from trial records, and the diagnostics built on
//! them.

mod diagnostics;
mod mle;

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::omega::omega_inv_exact;
use crate::rng;
use crate::scalar::binomial;
use crate::twirl::{InputKind, Outcome, TrialRecord, Variant};
use crate::Scalar;

pub use diagnostics::{
    correlation_scale, markovianity_test, scaling_law_test, DiagnosticTest, DiagnosticVerdict,
    WeightResidual, DIAGNOSTIC_CONFIDENCE,
};
pub use mle::{mle_fit, Contour, MLFit, MleOptions, CONTOUR_LEVELS};

/// Reference entries with magnitude below this are flagged unusable.
pub const RATIO_FLOOR: f64 = 1e-2;

/// Registers up to this size average over every subset under
/// [`SubsetPolicy::Auto`].
pub const EXHAUSTIVE_MAX_QUBITS: usize = 12;

/// Subsets drawn per trial and weight when not exhaustive.
pub const SAMPLED_SUBSETS: usize = 64;

/// Above this register size only variances are tracked, not covariances.
pub const FULL_COVARIANCE_MAX_QUBITS: usize = 64;

/// Largest register for explicit exhaustive averaging (keeps the scaled
/// sums inside 128-bit integers).
pub const EXHAUSTIVE_LIMIT: usize = 40;

/// Records folded per parallel task.
const CHUNK: usize = 4096;

/// How the weight-`w'` parity of one bitstring is averaged over subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsetPolicy {
    /// Exhaustive up to [`EXHAUSTIVE_MAX_QUBITS`], sampled beyond.
    #[default]
    Auto,
    /// Exact average over all `C(n, w')` subsets.
    Exhaustive,
    /// `subsets` distinct subsets per trial, drawn from a generator keyed on
    /// `(seed, trial index)`; exhaustive whenever `C(n, w') <= subsets`.
    Sampled { subsets: usize, seed: u64 },
}

impl SubsetPolicy {
    fn resolve(self, n: usize) -> Self {
        match self {
            SubsetPolicy::Auto if n <= EXHAUSTIVE_MAX_QUBITS => SubsetPolicy::Exhaustive,
            SubsetPolicy::Auto => SubsetPolicy::Sampled {
                subsets: SAMPLED_SUBSETS,
                seed: 0,
            },
            other => other,
        }
    }
}

/// Estimated eigenvalues with their sampling uncertainty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityEstimate {
    pub n: usize,
    pub variant: Variant,
    pub c_hat: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Covariance of `c_hat`, when tracked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<Vec<Vec<f64>>>,
    /// Even-parity counts `k = K (1 + c) / 2`, fractional under subset averaging.
    pub counts: Vec<f64>,
    /// Trials contributing to each weight.
    pub totals: Vec<u64>,
    /// Whether `c_hat` has been divided by a reference estimate.
    pub normalized: bool,
    /// Weights whose reference fell below [`RATIO_FLOOR`]; left undivided.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unusable: Vec<usize>,
}

impl ParityEstimate {
    /// Noise-free estimate of a known `c` backed by `trials` virtual trials
    /// per weight.
    pub fn exact(c: &[f64], trials: u64) -> Result<Self> {
        if c.is_empty() || (c[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("c[0] must be 1".into()));
        }
        let n = c.len() - 1;
        let mut est = Self {
            n,
            variant: Variant::Standard,
            c_hat: c.to_vec(),
            stderr: vec![0.0; n + 1],
            covariance: Some(vec![vec![0.0; n + 1]; n + 1]),
            counts: Vec::new(),
            totals: vec![trials; n + 1],
            normalized: false,
            unusable: Vec::new(),
        };
        est.c_hat[0] = 1.0;
        est.refresh_counts();
        Ok(est)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Total number of records behind the estimate.
    pub fn trials(&self) -> u64 {
        match self.variant {
            Variant::Standard => self.totals.get(1).copied().unwrap_or(0),
            Variant::Ensemble => self.totals[1..].iter().sum(),
        }
    }

    /// Covariance entry, falling back to `stderr^2` on the diagonal.
    pub fn cov(&self, i: usize, j: usize) -> f64 {
        match &self.covariance {
            Some(c) => c[i][j],
            None if i == j => self.stderr[i] * self.stderr[i],
            None => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.n + 1;
        for len in [self.c_hat.len(), self.stderr.len(), self.counts.len(), self.totals.len()] {
            Error::check_size(self.n, len.saturating_sub(1))?;
        }
        if let Some(cov) = &self.covariance {
            if cov.len() != d || cov.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidArgument("covariance has the wrong shape".into()));
            }
        }
        if (self.c_hat[0] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("c_hat[0] must be 1".into()));
        }
        if self.stderr.iter().any(|s| s.is_nan() || *s < 0.0) {
            return Err(Error::InvalidArgument("stderr must be nonnegative".into()));
        }
        Ok(())
    }

    fn refresh_counts(&mut self) {
        self.counts = self
            .c_hat
            .iter()
            .zip(&self.totals)
            .map(|(c, &k)| (k as f64 * (1.0 + c) / 2.0).clamp(0.0, k as f64))
            .collect();
    }
}

/// `C(n, w) x` mean parity of weight-`w` subsets of an `n`-bit string with
/// Hamming weight `h` (a Krawtchouk polynomial value).
fn krawtchouk(n: usize, w: usize, h: usize) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=h.min(w) {
        let term = binomial(h, j) * binomial(n - h, w - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::InvalidArgument("subset count overflows 64 bits".into()))
}

/// Folds trial records into integer parity sums.
///
/// Every per-trial value is an integer multiple of `1 / scale_w`, so the sums
/// are exact and any grouping of records gives identical estimates.
#[derive(Debug, Clone)]
pub struct ParityAccumulator {
    n: usize,
    variant: Option<Variant>,
    reference: Option<bool>,
    policy: SubsetPolicy,
    /// Per-weight denominator: subsets averaged per trial.
    scale: Vec<i64>,
    /// `table[h][w-1]`: scaled parity sum for Hamming weight `h`, filled for
    /// weights averaged over every subset.
    table: Vec<Vec<i64>>,
    all_subsets: Vec<bool>,
    full: bool,
    count: u64,
    sum: Vec<i128>,
    /// Row-major `n x n` when `full`, otherwise the diagonal.
    prod: Vec<i128>,
    ensemble_count: Vec<u64>,
    ensemble_sum: Vec<i64>,
}

impl ParityAccumulator {
    pub fn new(n: usize, policy: SubsetPolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        let policy = policy.resolve(n);
        let (scale, table, all_subsets) = match policy {
            SubsetPolicy::Exhaustive => {
                if n > EXHAUSTIVE_LIMIT {
                    return Err(Error::TooLarge {
                        what: "exhaustive subset averaging",
                        n,
                        max: EXHAUSTIVE_LIMIT,
                    });
                }
                let scale = (1..=n).map(|w| to_i64(&binomial(n, w))).collect::<Result<_>>()?;
                let table = (0..=n)
                    .map(|h| (1..=n).map(|w| to_i64(&krawtchouk(n, w, h))).collect())
                    .collect::<Result<_>>()?;
                (scale, table, vec![true; n])
            }
            SubsetPolicy::Sampled { subsets, .. } => {
                if subsets == 0 {
                    return Err(Error::InvalidArgument("need at least one subset".into()));
                }
                let cap = BigInt::from(subsets);
                let all: Vec<bool> = (1..=n).map(|w| binomial(n, w) <= cap).collect();
                let scale = (1..=n)
                    .map(|w| to_i64(&binomial(n, w).min(cap.clone())))
                    .collect::<Result<_>>()?;
                // Weights with no more than `subsets` subsets are averaged exactly.
                let table = (0..=n)
                    .map(|h| {
                        (1..=n)
                            .map(|w| if all[w - 1] { to_i64(&krawtchouk(n, w, h)) } else { Ok(0) })
                            .collect()
                    })
                    .collect::<Result<_>>()?;
                (scale, table, all)
            }
            SubsetPolicy::Auto => unreachable!("resolved above"),
        };
        let full = n <= FULL_COVARIANCE_MAX_QUBITS;
        Ok(Self {
            n,
            variant: None,
            reference: None,
            policy,
            scale,
            table,
            all_subsets,
            full,
            count: 0,
            sum: vec![0; n],
            prod: vec![0; if full { n * n } else { n }],
            ensemble_count: vec![0; n],
            ensemble_sum: vec![0; n],
        })
    }

    pub fn push(&mut self, record: &TrialRecord) -> Result<()> {
        Error::check_size(self.n, record.num_qubits())?;
        let variant = match record.input {
            InputKind::ZeroState => Variant::Standard,
            InputKind::ZWeight(_) => Variant::Ensemble,
        };
        if *self.variant.get_or_insert(variant) != variant
            || *self.reference.get_or_insert(record.is_reference) != record.is_reference
        {
            return Err(Error::MixedVariants);
        }
        record.validate()?;
        match (&record.input, &record.outcome) {
            (InputKind::ZeroState, Outcome::Bits(bits)) => {
                let y = self.standard_sample(record.trial_index, bits.as_slice());
                self.count += 1;
                for (i, &yi) in y.iter().enumerate() {
                    self.sum[i] += i128::from(yi);
                    if self.full {
                        for (j, &yj) in y.iter().enumerate() {
                            self.prod[i * self.n + j] += i128::from(yi * yj);
                        }
                    } else {
                        self.prod[i] += i128::from(yi * yi);
                    }
                }
            }
            (InputKind::ZWeight(w), Outcome::Sign(s)) => {
                self.ensemble_count[w - 1] += 1;
                self.ensemble_sum[w - 1] += i64::from(*s);
            }
            _ => unreachable!("validated above"),
        }
        Ok(())
    }

    fn standard_sample(&self, t: u64, bits: &[bool]) -> Vec<i64> {
        let n = self.n;
        let h = bits.iter().filter(|&&b| b).count();
        match self.policy {
            SubsetPolicy::Exhaustive => self.table[h].clone(),
            SubsetPolicy::Sampled { subsets, seed } => {
                let mut rng = rng::stream(seed, t);
                (1..=n)
                    .map(|w| {
                        if self.all_subsets[w - 1] {
                            return self.table[h][w - 1];
                        }
                        let mut seen = HashSet::with_capacity(subsets);
                        let mut acc = 0;
                        while seen.len() < subsets {
                            let mut s = index::sample(&mut rng, n, w).into_vec();
                            s.sort_unstable();
                            let odd = s.iter().filter(|&&q| bits[q]).count() % 2 == 1;
                            if seen.insert(s) {
                                acc += if odd { -1 } else { 1 };
                            }
                        }
                        acc
                    })
                    .collect()
            }
            SubsetPolicy::Auto => unreachable!("resolved in new"),
        }
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        Error::check_size(self.n, other.n)?;
        if self.policy != other.policy {
            return Err(Error::InvalidArgument("accumulators use different subset policies".into()));
        }
        match (self.variant, other.variant) {
            (Some(a), Some(b)) if a != b => return Err(Error::MixedVariants),
            (None, b) => self.variant = b,
            _ => {}
        }
        match (self.reference, other.reference) {
            (Some(a), Some(b)) if a != b => return Err(Error::MixedVariants),
            (None, b) => self.reference = b,
            _ => {}
        }
        self.count += other.count;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.prod.iter_mut().zip(&other.prod) {
            *a += b;
        }
        for w in 0..self.n {
            self.ensemble_count[w] += other.ensemble_count[w];
            self.ensemble_sum[w] += other.ensemble_sum[w];
        }
        Ok(())
    }

    pub fn is_reference(&self) -> Option<bool> {
        self.reference
    }

    pub fn records(&self) -> u64 {
        self.count + self.ensemble_count.iter().sum::<u64>()
    }

    pub fn finish(&self) -> Result<ParityEstimate> {
        let n = self.n;
        let variant = self.variant.ok_or(Error::EmptyRecords)?;
        let mut c_hat = vec![1.0; n + 1];
        let mut cov = vec![vec![0.0; n + 1]; n + 1];
        let mut totals = vec![0u64; n + 1];
        // Unbiased sample covariance of the trial mean, from exact sums:
        // (K S_ij - S_i S_j) / (K^2 (K - 1) s_i s_j).
        let cov_of_mean = |k: u64, si: i128, sj: i128, sij: i128, scale: f64| -> f64 {
            if k < 2 {
                return 0.0;
            }
            let k128 = i128::from(k);
            let num = k128 * sij - si * sj;
            let kf = k as f64;
            num as f64 / (kf * kf * (kf - 1.0) * scale)
        };
        let full = match variant {
            Variant::Standard => {
                let k = self.count;
                totals.fill(k);
                for i in 0..n {
                    c_hat[i + 1] = self.sum[i] as f64 / (k as f64 * self.scale[i] as f64);
                    for j in 0..n {
                        let sij = match (self.full, i == j) {
                            (true, _) => self.prod[i * n + j],
                            (false, true) => self.prod[i],
                            (false, false) => continue,
                        };
                        let scale = self.scale[i] as f64 * self.scale[j] as f64;
                        cov[i + 1][j + 1] = cov_of_mean(k, self.sum[i], self.sum[j], sij, scale);
                    }
                }
                self.full
            }
            Variant::Ensemble => {
                for i in 0..n {
                    let k = self.ensemble_count[i];
                    if k == 0 {
                        return Err(Error::InvalidArgument(format!("no records for w' = {}", i + 1)));
                    }
                    let s = i128::from(self.ensemble_sum[i]);
                    totals[i + 1] = k;
                    c_hat[i + 1] = s as f64 / k as f64;
                    // Each sign squares to one.
                    cov[i + 1][i + 1] = cov_of_mean(k, s, s, i128::from(k), 1.0);
                }
                totals[0] = totals[1..].iter().copied().min().unwrap_or(0);
                true
            }
        };
        let stderr = (0..=n).map(|i| cov[i][i].max(0.0).sqrt()).collect();
        let mut est = ParityEstimate {
            n,
            variant,
            c_hat,
            stderr,
            covariance: full.then_some(cov),
            counts: Vec::new(),
            totals,
            normalized: false,
            unusable: Vec::new(),
        };
        est.refresh_counts();
        Ok(est)
    }
}

/// Estimates `c_w' = 2 q_w' - 1` from standard bitstrings or ensemble signs.
///
/// Standard uncertainties come from the empirical spread across trials, so
/// correlations induced by reusing one bitstring for every subset are
/// included.
pub fn estimate_c(records: &[TrialRecord], policy: SubsetPolicy) -> Result<ParityEstimate> {
    let first = records.first().ok_or(Error::EmptyRecords)?;
    let n = first.num_qubits();
    let template = ParityAccumulator::new(n, policy)?;
    let parts = records
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = template.clone();
            for r in chunk {
                acc.push(r)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = template;
    for part in &parts {
        total.merge(part)?;
    }
    total.finish()
}

/// `c~_w = c_w / c_ref_w` with first-order error propagation, treating the
/// two estimates as independent.
pub fn normalize_reference(c: &ParityEstimate, c_ref: &ParityEstimate) -> Result<ParityEstimate> {
    c.validate()?;
    c_ref.validate()?;
    Error::check_size(c.n, c_ref.n)?;
    let d = c.n + 1;
    let unusable: Vec<usize> = (1..d).filter(|&w| c_ref.c_hat[w].abs() < RATIO_FLOOR).collect();
    let usable = |w: usize| !unusable.contains(&w);
    let r = &c_ref.c_hat;
    let mut out = c.clone();
    for w in (1..d).filter(|&w| usable(w)) {
        out.c_hat[w] = c.c_hat[w] / r[w];
    }
    let mut cov = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            cov[i][j] = if usable(i) && usable(j) {
                c.cov(i, j) / (r[i] * r[j])
                    + c.c_hat[i] * c.c_hat[j] * c_ref.cov(i, j) / (r[i] * r[i] * r[j] * r[j])
            } else {
                c.cov(i, j)
            };
        }
    }
    out.stderr = (0..d).map(|i| cov[i][i].max(0.0).sqrt()).collect();
    if c.covariance.is_some() || c_ref.covariance.is_some() {
        out.covariance = Some(cov);
    }
    out.normalized = true;
    out.unusable = unusable;
    out.refresh_counts();
    Ok(out)
}

/// Raw linear inversion `p = Ω⁻¹ c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearInversion {
    pub p: Vec<f64>,
    pub stderr: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    /// Entries outside `[0, 1]` by more than their standard error would
    /// explain are not singled out; any entry outside `[0, 1]` is listed.
    pub nonphysical: Vec<usize>,
}

/// `p = Ω⁻¹ c` with covariance `Ω⁻¹ Σ Ω⁻ᵀ`; entries are never clipped.
pub fn linear_invert(c: &ParityEstimate) -> Result<LinearInversion> {
    c.validate()?;
    let d = c.n + 1;
    // The product itself is exact: Ω⁻¹ has entries of size 3^n and
    // floating-point accumulation would lose most of the digits.
    let exact = omega_inv_exact(c.n)?;
    let c_exact = c
        .c_hat
        .iter()
        .map(|&v| {
            BigRational::from_float(v)
                .ok_or_else(|| Error::InvalidArgument(format!("non-finite c entry {v}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let p: Vec<f64> = exact.apply(&c_exact)?.iter().map(Scalar::to_f64).collect();
    let inv = exact.cast(Scalar::to_f64);
    let mut covariance = vec![vec![0.0f64; d]; d];
    for (a, row_a) in covariance.iter_mut().enumerate() {
        for (b, out) in row_a.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..d {
                for j in 0..d {
                    acc += inv.get(a, i) * c.cov(i, j) * inv.get(b, j);
                }
            }
            *out = acc;
        }
    }
    let stderr = (0..d).map(|w| covariance[w][w].max(0.0).sqrt()).collect();
    let nonphysical = p
        .iter()
        .enumerate()
        .filter(|(_, &v)| !(0.0..=1.0).contains(&v))
        .map(|(w, _)| w)
        .collect();
    Ok(LinearInversion {
        p,
        stderr,
        covariance,
        nonphysical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{depolarizing_product, engineered_channel, PauliChannel};
    use crate::omega::{omega_exact, omega_inv};
    use crate::pauli::PauliString;
    use crate::scalar::ratio;
    use crate::twirl::{simulate, Bits, NoiseChannel, ProtocolConfig};
    use proptest::prelude::*;

    fn bits_record(t: u64, s: &str) -> TrialRecord {
        TrialRecord {
            trial_index: t,
            clifford_ids: vec![0; s.len()],
            permutation: None,
            input: InputKind::ZeroState,
            outcome: Outcome::Bits(s.parse::<Bits>().unwrap()),
            is_reference: false,
        }
    }

    /// Exact `c` of a Pauli channel from its weight distribution.
    fn exact_c(ch: &PauliChannel) -> Vec<f64> {
        let p: Vec<BigRational> = ch
            .weight_distribution()
            .as_slice()
            .iter()
            .map(|&v| BigRational::from_float(v).unwrap())
            .collect();
        omega_exact(ch.num_qubits())
            .unwrap()
            .apply(&p)
            .unwrap()
            .iter()
            .map(Scalar::to_f64)
            .collect()
    }

    #[test]
    fn all_zero_bitstrings() {
        let recs: Vec<_> = (0..10).map(|t| bits_record(t, "000")).collect();
        let est = estimate_c(&recs, SubsetPolicy::Auto).unwrap();
        assert_eq!(est.c_hat, vec![1.0; 4]);
        assert_eq!(est.stderr, vec![0.0; 4]);
        assert_eq!(est.counts, vec![10.0; 4]);
    }

    #[test]
    fn balanced_single_qubit() {
        let recs: Vec<_> = (0..10)
            .map(|t| bits_record(t, if t % 2 == 0 { "0" } else { "1" }))
            .collect();
        let est = estimate_c(&recs, SubsetPolicy::Auto).unwrap();
        assert_eq!(est.c_hat, vec![1.0, 0.0]);
        // Sample variance 10/9 over ten trials.
        assert!((est.stderr[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn krawtchouk_matches_enumeration() {
        // Oracle: sum of (-1)^{|S ∩ b|} over every subset S of size w.
        let n = 5;
        for mask in 0u32..(1 << n) {
            let h = mask.count_ones() as usize;
            for w in 1..=n {
                let sum: i64 = (0u32..(1 << n))
                    .filter(|s| s.count_ones() as usize == w)
                    .map(|s| if (s & mask).count_ones() % 2 == 0 { 1 } else { -1 })
                    .sum();
                assert_eq!(krawtchouk(n, w, h), BigInt::from(sum));
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(estimate_c(&[], SubsetPolicy::Auto), Err(Error::EmptyRecords)));
        let mut recs = vec![bits_record(0, "00"), bits_record(1, "00")];
        recs[1].is_reference = true;
        assert!(matches!(estimate_c(&recs, SubsetPolicy::Auto), Err(Error::MixedVariants)));
        let mut recs = vec![bits_record(0, "00")];
        recs.push(TrialRecord {
            trial_index: 1,
            clifford_ids: vec![0, 0],
            permutation: Some(vec![0, 1]),
            input: InputKind::ZWeight(1),
            outcome: Outcome::Sign(1),
            is_reference: false,
        });
        assert!(matches!(estimate_c(&recs, SubsetPolicy::Auto), Err(Error::MixedVariants)));
        let recs = vec![bits_record(0, "00"), bits_record(1, "000")];
        assert!(estimate_c(&recs, SubsetPolicy::Auto).is_err());
    }

    #[test]
    fn grouping_does_not_change_the_estimate() {
        let ch = depolarizing_product(&[0.1, 0.2, 0.05]).unwrap();
        let cfg = ProtocolConfig::new(NoiseChannel::Pauli(ch), Variant::Standard, 3 * CHUNK + 17, 3);
        let recs = simulate(&cfg).unwrap();
        let batch = estimate_c(&recs, SubsetPolicy::Auto).unwrap();
        let mut seq = ParityAccumulator::new(3, SubsetPolicy::Auto).unwrap();
        for r in &recs {
            seq.push(r).unwrap();
        }
        assert_eq!(seq.finish().unwrap(), batch);
        let (a, b) = recs.split_at(1234);
        let mut left = ParityAccumulator::new(3, SubsetPolicy::Auto).unwrap();
        let mut right = left.clone();
        b.iter().for_each(|r| right.push(r).unwrap());
        a.iter().for_each(|r| left.push(r).unwrap());
        right.merge(&left).unwrap();
        assert_eq!(right.finish().unwrap(), batch);
        assert_eq!(right.records(), recs.len() as u64);
    }

    #[test]
    fn unitary_fixture_estimate() {
        let k = 100_000;
        let cfg = ProtocolConfig::new(
            NoiseChannel::Kraus(engineered_channel("chcl3_unitary").unwrap()),
            Variant::Standard,
            k,
            21,
        );
        let est = estimate_c(&simulate(&cfg).unwrap(), SubsetPolicy::Auto).unwrap();
        let expected = [1.0, 1.0 / 3.0, 1.0 / 9.0];
        for w in 1..=2 {
            assert!((est.c_hat[w] - expected[w]).abs() < 3.0 * est.stderr[w], "{est:?}");
        }
    }

    #[test]
    fn standard_and_ensemble_agree() {
        let ch = PauliChannel::new(
            3,
            [
                ("III".parse().unwrap(), 0.7),
                ("ZZI".parse().unwrap(), 0.2),
                ("XYZ".parse().unwrap(), 0.1),
            ],
        )
        .unwrap();
        let exact = exact_c(&ch);
        let k = 50_000;
        for variant in [Variant::Standard, Variant::Ensemble] {
            let cfg = ProtocolConfig::new(NoiseChannel::Pauli(ch.clone()), variant, k, 5);
            let est = estimate_c(&simulate(&cfg).unwrap(), SubsetPolicy::Auto).unwrap();
            assert_eq!(est.variant, variant);
            for w in 1..=3 {
                assert!((est.c_hat[w] - exact[w]).abs() < 4.0 * est.stderr[w], "{variant:?} {est:?}");
            }
        }
    }

    #[test]
    fn omega_matches_averaged_commutation_sign() {
        // Oracle: for a Pauli error of weight w, average over every weight-m
        // observable of the commutation sign equals Ω[m][w].
        for n in 1..=4 {
            let omega = omega_exact(n).unwrap();
            let all: Vec<PauliString> = PauliString::all(n).collect();
            for err in &all {
                let w = err.weight();
                for m in 0..=n {
                    let (mut sum, mut count) = (0i64, 0i64);
                    for obs in all.iter().filter(|o| o.weight() == m) {
                        sum += if err.commutes(obs).unwrap() { 1 } else { -1 };
                        count += 1;
                    }
                    assert_eq!(*omega.get(m, w), ratio(sum, count), "n={n} m={m} w={w}");
                }
            }
        }
    }

    #[test]
    fn sampled_policy_is_consistent() {
        let n = 14;
        let ch = PauliChannel::new(
            n,
            [
                (PauliString::identity(n), 0.6),
                ("ZZZIIIIIIIIIII".parse().unwrap(), 0.25),
                ("IIIIXYZXYZXIII".parse().unwrap(), 0.15),
            ],
        )
        .unwrap();
        let exact = exact_c(&ch);
        let cfg = ProtocolConfig::new(NoiseChannel::Pauli(ch), Variant::Standard, 4000, 8);
        let recs = simulate(&cfg).unwrap();
        let est = estimate_c(&recs, SubsetPolicy::Auto).unwrap();
        let again = estimate_c(&recs, SubsetPolicy::Sampled { subsets: 64, seed: 0 }).unwrap();
        assert_eq!(est, again);
        let exhaustive = estimate_c(&recs, SubsetPolicy::Exhaustive).unwrap();
        for w in 1..=n {
            assert!((est.c_hat[w] - exact[w]).abs() < 5.0 * est.stderr[w] + 1e-9, "w={w}");
            assert!((exhaustive.c_hat[w] - exact[w]).abs() < 5.0 * exhaustive.stderr[w] + 1e-9);
        }
        // Sampling adds variance on top of the exhaustive average.
        assert!(est.stderr[n / 2] >= exhaustive.stderr[n / 2]);
    }

    #[test]
    fn normalization_examples() {
        let c = ParityEstimate::exact(&[1.0, 0.5, 0.25], 100).unwrap();
        let ones = ParityEstimate::exact(&[1.0, 1.0, 1.0], 100).unwrap();
        let same = normalize_reference(&c, &ones).unwrap();
        assert_eq!(same.c_hat, c.c_hat);
        assert!(same.normalized);

        // Raw c_1 = 0.81 c_true against a reference of 0.81.
        let truth = 0.6;
        let raw = ParityEstimate::exact(&[1.0, 0.81 * truth], 100).unwrap();
        let reference = ParityEstimate::exact(&[1.0, 0.81], 100).unwrap();
        let fixed = normalize_reference(&raw, &reference).unwrap();
        assert!((fixed.c_hat[1] - truth).abs() < 1e-15);

        let tiny = ParityEstimate::exact(&[1.0, 1e-4, 0.5], 100).unwrap();
        let flagged = normalize_reference(&c, &tiny).unwrap();
        assert_eq!(flagged.unusable, vec![1]);
        assert_eq!(flagged.c_hat[1], 0.5);
        assert_eq!(flagged.c_hat[2], 0.5);
    }

    #[test]
    fn ratio_variance_propagation() {
        // Oracle: delta method for independent numerator and denominator.
        let mut c = ParityEstimate::exact(&[1.0, 0.4], 100).unwrap();
        c.stderr[1] = 0.02;
        c.covariance = None;
        let mut r = ParityEstimate::exact(&[1.0, 0.8], 100).unwrap();
        r.stderr[1] = 0.01;
        r.covariance = None;
        let out = normalize_reference(&c, &r).unwrap();
        let want = ((0.02f64 / 0.8).powi(2) + (0.4 * 0.01 / 0.64f64).powi(2)).sqrt();
        assert!((out.stderr[1] - want).abs() < 1e-15);
    }

    #[test]
    fn linear_invert_examples() {
        let c = ParityEstimate::exact(&[1.0, 1.0 / 3.0, 1.0 / 9.0], 1).unwrap();
        let p = linear_invert(&c).unwrap();
        for (a, b) in p.p.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(p.nonphysical.is_empty());
        let id = linear_invert(&ParityEstimate::exact(&[1.0; 5], 1).unwrap()).unwrap();
        for (w, v) in id.p.iter().enumerate() {
            assert!((v - if w == 0 { 1.0 } else { 0.0 }).abs() < 1e-13);
        }
        // Slightly above the identity point pushes p_1 negative.
        let over = linear_invert(&ParityEstimate::exact(&[1.0, 1.0, 1.01], 1).unwrap()).unwrap();
        assert!(!over.nonphysical.is_empty());
        assert!(over.p.iter().any(|&v| v < 0.0));
    }

    #[test]
    fn linear_invert_propagates_variance() {
        let mut c = ParityEstimate::exact(&[1.0, 0.3, 0.1], 1).unwrap();
        c.covariance = None;
        c.stderr = vec![0.0, 0.01, 0.02];
        let inv = omega_inv::<f64>(2).unwrap();
        let out = linear_invert(&c).unwrap();
        for w in 0..3 {
            let want = ((inv.get(w, 1) * 0.01).powi(2) + (inv.get(w, 2) * 0.02).powi(2)).sqrt();
            assert!((out.stderr[w] - want).abs() < 1e-15);
        }
    }

    proptest! {
        #[test]
        fn linear_round_trip(n in 1usize..=12, raw in proptest::collection::vec(0.0f64..1.0, 13)) {
            let raw = &raw[..=n];
            let total: f64 = raw.iter().sum::<f64>() + 1e-9;
            let p: Vec<f64> = raw.iter().map(|v| (v + 1e-9 / (n + 1) as f64) / total).collect();
            let c = crate::omega::omega::<f64>(n).unwrap().apply(&p).unwrap();
            let back = linear_invert(&ParityEstimate::exact(&c, 1).unwrap()).unwrap();
            for (a, b) in back.p.iter().zip(&p) {
                prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }

        #[test]
        fn reference_of_ones_changes_nothing(c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
            let c = ParityEstimate::exact(&[1.0, c1, c2], 50).unwrap();
            let out = normalize_reference(&c, &ParityEstimate::exact(&[1.0; 3], 50).unwrap()).unwrap();
            prop_assert_eq!(out.c_hat, c.c_hat);
            prop_assert_eq!(out.counts, c.counts);
        }
    }
}
