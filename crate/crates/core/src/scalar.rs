// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by the combinatorial matrices and the
//! weight/eigenvalue vectors.
//!
//! Everything combinatorial is computed once in [`BigRational`] and then
//! converted with [`Scalar::from_rational`], so `f32`, `f64` and exact
//! rationals all see the same values up to their own rounding.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Field-like scalar usable in the weight-space linear algebra.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + Send + Sync + 'static {
    /// Converts an exact rational, rounding as the type requires.
    fn from_rational(r: &BigRational) -> Self;

    /// Lossy view as `f64`.
    fn to_f64(&self) -> f64;

    /// Whether `self` and `other` agree within `tol` (exact types ignore `tol`).
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).abs().to_f64() <= tol
    }
}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

/// Exact rational `num / den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact `base^exp` as a big integer.
pub fn pow_big(base: i64, exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), exp)
}
