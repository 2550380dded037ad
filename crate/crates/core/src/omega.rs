// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Exact change of basis between error-weight probabilities and Pauli
//! eigenvalues, the Hamming-weight matrix, and sample-size and uncertainty
//! bounds.
//!
//! All entries are computed in [`BigRational`] and cached per `n`; callers
//! pick their working precision with [`OmegaMatrix::cast`].

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, pow_big, Scalar};
use crate::weights::{EigenvalueVector, WeightDistribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `c = Ω p`.
    WeightsToEigenvalues,
    /// `p = Ω⁻¹ c`.
    EigenvaluesToWeights,
}

/// Square `(n+1) x (n+1)` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaMatrix<T> {
    n: usize,
    entries: Vec<T>,
    direction: Direction,
}

impl<T: Scalar> OmegaMatrix<T> {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.entries[row * self.dim() + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        let d = self.dim();
        &self.entries[row * d..(row + 1) * d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.dim())
    }

    pub fn cast<U: Scalar>(&self, f: impl Fn(&T) -> U) -> OmegaMatrix<U> {
        OmegaMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
            direction: self.direction,
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        Error::check_size(self.n, v.len().saturating_sub(1))?;
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect())
    }

    /// Matrix product `self * other`, row-major.
    pub fn matmul(&self, other: &Self) -> Result<Vec<T>> {
        Error::check_size(self.n, other.n)?;
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push((0..d).fold(T::zero(), |acc, k| {
                    acc + self.get(i, k).clone() * other.get(k, j).clone()
                }));
            }
        }
        Ok(out)
    }

    /// `c = Ω p`.
    pub fn eigenvalues(&self, p: &WeightDistribution<T>) -> Result<EigenvalueVector<T>> {
        self.expect(Direction::WeightsToEigenvalues)?;
        EigenvalueVector::new(self.apply(p.as_slice())?)
    }

    /// `p = Ω⁻¹ c`; the result is not projected onto the simplex.
    pub fn weights(&self, c: &EigenvalueVector<T>) -> Result<WeightDistribution<T>> {
        self.expect(Direction::EigenvaluesToWeights)?;
        WeightDistribution::new(self.apply(c.as_slice())?)
    }

    fn expect(&self, d: Direction) -> Result<()> {
        if self.direction == d {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "matrix maps {:?}, not {:?}",
                self.direction, d
            )))
        }
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for OmegaMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

type Cache = RwLock<HashMap<(usize, Direction), Arc<OmegaMatrix<BigRational>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached(n: usize, d: Direction) -> Arc<OmegaMatrix<BigRational>> {
    if let Some(m) = cache().read().expect("cache poisoned").get(&(n, d)) {
        return Arc::clone(m);
    }
    let m = Arc::new(match d {
        Direction::WeightsToEigenvalues => build_omega(n),
        Direction::EigenvaluesToWeights => build_omega_inv(n),
    });
    // Concurrent builders produce identical values; first insert wins.
    Arc::clone(
        cache()
            .write()
            .expect("cache poisoned")
            .entry((n, d))
            .or_insert(m),
    )
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Exact Ω for `n` qubits: row `m` is the observable weight, column `w` the
/// error weight.
pub fn omega_exact(n: usize) -> Result<Arc<OmegaMatrix<BigRational>>> {
    check_n(n)?;
    Ok(cached(n, Direction::WeightsToEigenvalues))
}

/// Exact Ω⁻¹ for `n` qubits.
pub fn omega_inv_exact(n: usize) -> Result<Arc<OmegaMatrix<BigRational>>> {
    check_n(n)?;
    Ok(cached(n, Direction::EigenvaluesToWeights))
}

/// Ω converted to `T`.
pub fn omega<T: Scalar>(n: usize) -> Result<OmegaMatrix<T>> {
    Ok(omega_exact(n)?.cast(T::from_rational))
}

/// Ω⁻¹ converted to `T`.
pub fn omega_inv<T: Scalar>(n: usize) -> Result<OmegaMatrix<T>> {
    Ok(omega_inv_exact(n)?.cast(T::from_rational))
}

/// Scaling factor of a weight-`m` observable under the uniform mixture of
/// weight-`w` errors.
fn omega_entry(n: usize, m: usize, w: usize) -> BigRational {
    let lo = (w + m).saturating_sub(n);
    let hi = m.min(w);
    let denom = binomial(n, w);
    let mut acc = -BigRational::one();
    for l in lo..=hi {
        let count = binomial(n - m, w - l) * binomial(m, l);
        let three_l = pow_big(3, l);
        let sign = if l % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        acc += BigRational::new(count * (&three_l + sign), denom.clone() * three_l);
    }
    acc
}

fn build_omega(n: usize) -> OmegaMatrix<BigRational> {
    let d = n + 1;
    let mut entries = Vec::with_capacity(d * d);
    for m in 0..d {
        for w in 0..d {
            entries.push(omega_entry(n, m, w));
        }
    }
    OmegaMatrix {
        n,
        entries,
        direction: Direction::WeightsToEigenvalues,
    }
}

fn build_omega_inv(n: usize) -> OmegaMatrix<BigRational> {
    let fwd = cached(n, Direction::WeightsToEigenvalues);
    let four_n = pow_big(4, n);
    let d = n + 1;
    let mut entries = Vec::with_capacity(d * d);
    for m in 0..d {
        for w in 0..d {
            let scale = BigRational::new(
                pow_big(3, m + w) * binomial(n, m) * binomial(n, w),
                four_n.clone(),
            );
            entries.push(scale * fwd.get(m, w));
        }
    }
    OmegaMatrix {
        n,
        entries,
        direction: Direction::EigenvaluesToWeights,
    }
}

/// `R[h][w] = C(w, h) 2^h / 3^w`: probability that a weight-`w` error
/// flips exactly `h` output bits of `|0...0>` after twirling.
#[derive(Debug, Clone, PartialEq)]
pub struct HammingMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> HammingMatrix<T> {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, h: usize, w: usize) -> &T {
        &self.entries[h * (self.n + 1) + w]
    }

    /// `u = R p`.
    pub fn apply(&self, p: &[T]) -> Result<Vec<T>> {
        Error::check_size(self.n, p.len().saturating_sub(1))?;
        let d = self.n + 1;
        Ok((0..d)
            .map(|h| {
                (0..d).fold(T::zero(), |acc, w| acc + self.get(h, w).clone() * p[w].clone())
            })
            .collect())
    }

    /// Solves `R p = u` by back substitution.
    pub fn recover(&self, u: &[T]) -> Result<HammingRecovery<T>> {
        Error::check_size(self.n, u.len().saturating_sub(1))?;
        let d = self.n + 1;
        let mut p = vec![T::zero(); d];
        for w in (0..d).rev() {
            let mut rhs = u[w].clone();
            for k in (w + 1)..d {
                rhs = rhs - self.get(w, k).clone() * p[k].clone();
            }
            p[w] = rhs / self.get(w, w).clone();
        }
        let nonphysical = p
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_negative())
            .map(|(w, _)| w)
            .collect();
        Ok(HammingRecovery {
            p: WeightDistribution::new(p)?,
            nonphysical,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HammingRecovery<T> {
    pub p: WeightDistribution<T>,
    /// Weights whose recovered probability is negative.
    pub nonphysical: Vec<usize>,
}

pub fn hamming_matrix_exact(n: usize) -> Result<HammingMatrix<BigRational>> {
    check_n(n)?;
    let d = n + 1;
    let mut entries = Vec::with_capacity(d * d);
    for h in 0..d {
        for w in 0..d {
            entries.push(BigRational::new(
                binomial(w, h) * pow_big(2, h),
                pow_big(3, w),
            ));
        }
    }
    Ok(HammingMatrix { n, entries })
}

pub fn hamming_matrix<T: Scalar>(n: usize) -> Result<HammingMatrix<T>> {
    let exact = hamming_matrix_exact(n)?;
    Ok(HammingMatrix {
        n,
        entries: exact.entries.iter().map(T::from_rational).collect(),
    })
}

/// Back-substitution recovery of `p` from Hamming-weight frequencies `u`.
pub fn recover_p_from_hamming<T: Scalar>(u: &[T]) -> Result<HammingRecovery<T>> {
    if u.len() < 2 {
        return Err(Error::InvalidArgument("need at least n + 1 = 2 entries".into()));
    }
    hamming_matrix::<T>(u.len() - 1)?.recover(u)
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must lie in (0, 1)")))
    }
}

/// `ceil(x)`, except values within relative `1e-9` of an integer snap to it
/// so closed forms like `ln(e) / 0.01` do not round up on representation error.
fn ceil_snapped(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Trials for one even-parity probability to land within `delta` of its mean
/// with probability at least `1 - epsilon`: `ceil(ln(2/epsilon) / delta^2)`.
pub fn chernoff_sample_size(delta: f64, epsilon: f64) -> Result<u64> {
    check_unit_interval("delta", delta)?;
    check_unit_interval("epsilon", epsilon)?;
    Ok(ceil_snapped((2.0 / epsilon).ln() / (delta * delta)))
}

/// Trials for all `n + 1` parameters simultaneously:
/// `ceil(ln(2(n+1)/epsilon) / delta^2)`.
pub fn union_bound_sample_size(n: usize, delta: f64, epsilon: f64) -> Result<u64> {
    check_n(n)?;
    check_unit_interval("delta", delta)?;
    check_unit_interval("epsilon", epsilon)?;
    Ok(ceil_snapped(
        (2.0 * (n as f64 + 1.0) / epsilon).ln() / (delta * delta),
    ))
}

/// Upper bounds on the standard deviation of an estimated `p_w` given a
/// common standard deviation `sigma` of every `c` estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBounds {
    pub n: usize,
    pub w: usize,
    /// `sigma * sum_i |Ω⁻¹[w][i]|`, the worst case over covariances.
    pub tight: f64,
    /// `sigma * 3^w C(n, w)`.
    pub simple: f64,
    /// `sigma * (3 e n / w)^w`.
    pub loose: f64,
    /// Exact `sum_i |Ω⁻¹[w][i]|` as a reduced fraction.
    pub tight_factor: String,
}

/// Exact `sum_i |Ω⁻¹[w][i]|`.
pub fn worst_case_factor(n: usize, w: usize) -> Result<BigRational> {
    if w > n {
        return Err(Error::InvalidArgument(format!("w = {w} exceeds n = {n}")));
    }
    let inv = omega_inv_exact(n)?;
    Ok(inv
        .row(w)
        .iter()
        .fold(BigRational::zero(), |acc, v| acc + v.abs()))
}

/// `3^w C(n, w)`.
pub fn simple_factor(n: usize, w: usize) -> BigInt {
    pow_big(3, w) * binomial(n, w)
}

/// `(3 e n / w)^w`, with the `w = 0` case equal to 1.
pub fn loose_factor(n: usize, w: usize) -> f64 {
    if w == 0 {
        1.0
    } else {
        (3.0 * std::f64::consts::E * n as f64 / w as f64).powi(w as i32)
    }
}

pub fn uncertainty_bounds(n: usize, w: usize, sigma: f64) -> Result<UncertaintyBounds> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!("sigma = {sigma} must be positive")));
    }
    let tight = worst_case_factor(n, w)?;
    Ok(UncertaintyBounds {
        n,
        w,
        tight: sigma * tight.to_f64(),
        simple: sigma * Scalar::to_f64(&BigRational::from_integer(simple_factor(n, w))),
        loose: sigma * loose_factor(n, w),
        tight_factor: tight.to_string(),
    })
}

/// Checks `tight <= simple <= loose` for the factors in exact arithmetic.
///
/// The loose factor contains `e`; it is compared through the rational lower
/// bound `e > 2718281828 / 10^9`, which can only make the check stricter.
pub fn bound_ordering_holds(n: usize, w: usize) -> Result<bool> {
    let tight = worst_case_factor(n, w)?;
    let simple = BigRational::from_integer(simple_factor(n, w));
    if tight > simple {
        return Ok(false);
    }
    if w == 0 {
        return Ok(simple <= BigRational::one());
    }
    let e_lower = BigRational::new(BigInt::from(2_718_281_828_u64), BigInt::from(1_000_000_000_u64));
    let base = BigRational::from_integer(BigInt::from(3 * n)) * e_lower
        / BigRational::from_integer(BigInt::from(w));
    let loose_lower = num_traits::pow(base, w);
    Ok(simple <= loose_lower)
}
