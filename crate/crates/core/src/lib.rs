// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Symmetrised characterisation of n-qubit noise channels.
//!
//! A noise channel is twirled by independent random single-qubit Cliffords,
//! which collapses it onto `n + 1` parameters: the probabilities `p_w` of
//! weight-`w` Pauli errors, or equivalently the eigenvalues `c_w` by which
//! weight-`w` Pauli observables are scaled. This crate simulates the
//! protocol, relates the two descriptions exactly, and estimates them from
//! trial data together with diagnostics for correlated and non-Markovian
//! noise.

pub mod channel;
pub mod cli;
pub mod dense;
pub mod error;
pub mod estimator;
pub mod io;
pub mod omega;
pub mod pauli;
pub mod rng;
pub mod scalar;
pub mod twirl;
pub mod weights;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use scalar::Scalar;

/// Exact Ω or Ω⁻¹.
pub type ExactOmega = omega::OmegaMatrix<BigRational>;
/// Double-precision Ω or Ω⁻¹.
pub type OmegaF64 = omega::OmegaMatrix<f64>;
/// Single-precision Ω or Ω⁻¹.
pub type OmegaF32 = omega::OmegaMatrix<f32>;
pub type ExactWeights = weights::WeightDistribution<BigRational>;
pub type Weights = weights::WeightDistribution<f64>;
pub type ExactEigenvalues = weights::EigenvalueVector<BigRational>;
pub type Eigenvalues = weights::EigenvalueVector<f64>;
