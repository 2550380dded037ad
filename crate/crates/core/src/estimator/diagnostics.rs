// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Scaling-law, semigroup and correlation-scale diagnostics.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::ParityEstimate;
use crate::error::{Error, Result};
use crate::scalar::binomial;

pub const DIAGNOSTIC_CONFIDENCE: f64 = 0.95;

/// Residuals at or below this count as zero when there is no sampling noise.
const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticTest {
    Scaling,
    Markov,
    ScaleB,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightResidual {
    pub w: usize,
    pub observed: f64,
    pub predicted: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticVerdict {
    pub test: DiagnosticTest,
    #[serde(with = "extended_float")]
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub details: Vec<WeightResidual>,
}

impl DiagnosticVerdict {
    fn new(test: DiagnosticTest, statistic: f64, threshold: f64, details: Vec<WeightResidual>) -> Self {
        Self {
            test,
            statistic,
            threshold,
            pass: statistic <= threshold,
            details,
        }
    }
}

/// JSON has no infinity; it is written as the string `"inf"`.
mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("bad statistic `{t}`"))),
        }
    }
}

/// Bonferroni threshold for the largest of `d` squared z-scores: the
/// chi-square(1) quantile at `1 - (1 - DIAGNOSTIC_CONFIDENCE) / d`.
fn max_z_threshold(d: usize) -> Result<f64> {
    if d == 0 {
        return Ok(0.0);
    }
    let chi = ChiSquared::new(1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(chi.inverse_cdf(1.0 - (1.0 - DIAGNOSTIC_CONFIDENCE) / d as f64))
}

/// Largest `r_i^2 / V_ii`. Components with zero variance contribute zero if
/// the residual vanishes and infinity otherwise.
///
/// A joint `r' V^-1 r` is not used: for weak noise the residuals are nearly
/// collinear and the least-variance direction is set by counts of rare
/// high-weight outcomes, where the normal approximation fails badly.
fn max_z(r: &[f64], v: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &ri) in r.iter().enumerate() {
        let var = v[(i, i)];
        if var > 0.0 {
            worst = worst.max(ri * ri / var);
        } else if ri.abs() > EXACT_TOLERANCE {
            return f64::INFINITY;
        }
    }
    worst
}

/// `V = J Σ Jᵀ` for the estimate's covariance.
fn sandwich(est: &ParityEstimate, jac: &[Vec<f64>]) -> DMatrix<f64> {
    let d = est.n + 1;
    let sigma = DMatrix::from_fn(d, d, |i, j| est.cov(i, j));
    let j = DMatrix::from_fn(jac.len(), d, |a, b| jac[a][b]);
    &j * sigma * j.transpose()
}

/// Tests `c_w = c_1^w` for `w >= 2`: the largest squared z-score of the
/// residuals (delta-method variances) against a Bonferroni threshold.
pub fn scaling_law_test(c: &ParityEstimate) -> Result<DiagnosticVerdict> {
    c.validate()?;
    let n = c.n;
    let c1 = c.c_hat[1];
    let mut residuals = Vec::new();
    let mut jac = Vec::new();
    let mut details = Vec::new();
    for w in 2..=n {
        let predicted = c1.powi(w as i32);
        residuals.push(c.c_hat[w] - predicted);
        let mut row = vec![0.0; n + 1];
        row[w] = 1.0;
        row[1] = -(w as f64) * c1.powi(w as i32 - 1);
        jac.push(row);
        details.push(WeightResidual {
            w,
            observed: c.c_hat[w],
            predicted,
            stderr: 0.0,
        });
    }
    let v = sandwich(c, &jac);
    for (i, d) in details.iter_mut().enumerate() {
        d.stderr = v[(i, i)].max(0.0).sqrt();
    }
    let statistic = max_z(&residuals, &v);
    Ok(DiagnosticVerdict::new(
        DiagnosticTest::Scaling,
        statistic,
        max_z_threshold(residuals.len())?,
        details,
    ))
}

/// Tests `c_w(m tau) = c_w(tau)^m` for `w >= 1` like [`scaling_law_test`],
/// treating the two estimates as independent.
///
/// `c_w` averages the Pauli eigenvalues of weight `w`, so the identity is
/// exact only when those eigenvalues are equal within each weight (for
/// example permutation-invariant noise); otherwise the mean of powers
/// exceeds the power of the mean.
pub fn markovianity_test(c_tau: &ParityEstimate, c_mtau: &ParityEstimate, m: u32) -> Result<DiagnosticVerdict> {
    c_tau.validate()?;
    c_mtau.validate()?;
    Error::check_size(c_tau.n, c_mtau.n)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let n = c_tau.n;
    let mut residuals = Vec::new();
    let mut jac_tau = Vec::new();
    let mut jac_m = Vec::new();
    let mut details = Vec::new();
    for w in 1..=n {
        let base = c_tau.c_hat[w];
        let predicted = base.powi(m as i32);
        residuals.push(c_mtau.c_hat[w] - predicted);
        let mut rt = vec![0.0; n + 1];
        rt[w] = -(m as f64) * base.powi(m as i32 - 1);
        jac_tau.push(rt);
        let mut rm = vec![0.0; n + 1];
        rm[w] = 1.0;
        jac_m.push(rm);
        details.push(WeightResidual {
            w,
            observed: c_mtau.c_hat[w],
            predicted,
            stderr: 0.0,
        });
    }
    let v = sandwich(c_tau, &jac_tau) + sandwich(c_mtau, &jac_m);
    for (i, d) in details.iter_mut().enumerate() {
        d.stderr = v[(i, i)].max(0.0).sqrt();
    }
    let statistic = max_z(&residuals, &v);
    Ok(DiagnosticVerdict::new(
        DiagnosticTest::Markov,
        statistic,
        max_z_threshold(n)?,
        details,
    ))
}

/// Smallest scale `b` beyond which `p` is explained by independent errors.
///
/// With `t_w = p_w / C(n, w)` and `rho_b = max_{1 <= v <= b} (t_v / t_0)^{1/v}`,
/// weights `w > b` must satisfy `p_w <= C(n, w) t_0 rho_b^w + tolerance *
/// stderr_w`: larger values mean errors cluster more than independent
/// extrapolation from weights `<= b` allows. The statistic is `b`; the
/// verdict passes when some `b < n` works.
pub fn correlation_scale(p: &[f64], stderr: &[f64], tolerance: f64) -> Result<DiagnosticVerdict> {
    if p.len() < 2 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    Error::check_size(p.len() - 1, stderr.len().saturating_sub(1))?;
    if tolerance < 0.0 {
        return Err(Error::InvalidArgument("tolerance must be nonnegative".into()));
    }
    let n = p.len() - 1;
    let binom: Vec<f64> = (0..=n).map(|w| num_traits::ToPrimitive::to_f64(&binomial(n, w)).unwrap_or(f64::INFINITY)).collect();
    let t: Vec<f64> = (0..=n).map(|w| p[w].max(0.0) / binom[w]).collect();
    let predictions = |b: usize| -> Vec<f64> {
        if t[0] <= 0.0 {
            // No independent model has p_0 = 0; extrapolate nothing.
            return (0..=n).map(|w| if w <= b { p[w] } else { 0.0 }).collect();
        }
        let rho = (1..=b)
            .map(|v| (t[v] / t[0]).powf(1.0 / v as f64))
            .fold(0.0, f64::max);
        (0..=n).map(|w| binom[w] * t[0] * rho.powi(w as i32)).collect()
    };
    let consistent = |b: usize, pred: &[f64]| {
        (b + 1..=n).all(|w| p[w] <= pred[w] + tolerance * stderr[w] + EXACT_TOLERANCE)
    };
    let b = (0..=n).find(|&b| consistent(b, &predictions(b))).unwrap_or(n);
    let pred = predictions(b);
    let details = (1..=n)
        .map(|w| WeightResidual {
            w,
            observed: p[w],
            predicted: pred[w],
            stderr: stderr[w],
        })
        .collect();
    Ok(DiagnosticVerdict::new(
        DiagnosticTest::ScaleB,
        b as f64,
        n.saturating_sub(1) as f64,
        details,
    ))
}
