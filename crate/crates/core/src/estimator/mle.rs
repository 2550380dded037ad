// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Constrained maximum likelihood over the probability simplex, with
//! profile-likelihood confidence contours.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::omega::omega;
use crate::weights::WeightDistribution;

pub const CONTOUR_LEVELS: [f64; 3] = [0.68, 0.95, 0.99];

/// Contours are traced for `2 <= n <= MAX_CONTOUR_QUBITS` by default.
pub const MAX_CONTOUR_QUBITS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct MleOptions {
    /// Stop when the projected-gradient norm of the per-trial
    /// log-likelihood falls below this.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub contours: bool,
    pub levels: Vec<f64>,
    /// Rays per contour.
    pub rays: usize,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 10_000,
            contours: true,
            levels: CONTOUR_LEVELS.to_vec(),
            rays: 72,
        }
    }
}

impl MleOptions {
    pub fn without_contours() -> Self {
        Self {
            contours: false,
            ..Self::default()
        }
    }
}

/// Closed polyline of full `p` vectors bounding the profile-likelihood
/// region of `pair` at `level`; the first point is repeated at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub level: f64,
    pub pair: (usize, usize),
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MLFit {
    pub p_hat: WeightDistribution<f64>,
    pub log_likelihood: f64,
    pub contours: Vec<Contour>,
    pub levels: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
}

impl MLFit {
    /// Half the extent of the `level` region along each coordinate, taken
    /// over every contour at that level.
    pub fn half_widths(&self, level: f64) -> Option<Vec<f64>> {
        let d = self.p_hat.as_slice().len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut any = false;
        for c in self.contours.iter().filter(|c| (c.level - level).abs() < 1e-12) {
            for pt in &c.points {
                any = true;
                for w in 0..d {
                    lo[w] = lo[w].min(pt[w]);
                    hi[w] = hi[w].max(pt[w]);
                }
            }
        }
        any.then(|| lo.iter().zip(&hi).map(|(l, h)| (h - l) / 2.0).collect())
    }
}

/// Bernoulli-parity log-likelihood `sum_w k_w ln q_w + (K_w - k_w) ln(1 - q_w)`
/// with `q = (1 + Ω p) / 2`, divided by the total trial count.
struct Likelihood {
    rows: Vec<Vec<f64>>,
    even: Vec<f64>,
    odd: Vec<f64>,
    norm: f64,
}

impl Likelihood {
    fn q(&self, row: &[f64], p: &[f64]) -> f64 {
        let c: f64 = row.iter().zip(p).map(|(a, b)| a * b).sum();
        ((1.0 + c) / 2.0).clamp(0.0, 1.0)
    }

    fn value(&self, p: &[f64]) -> f64 {
        let mut acc = 0.0;
        for ((row, &k), &m) in self.rows.iter().zip(&self.even).zip(&self.odd) {
            let q = self.q(row, p);
            if k > 0.0 {
                acc += k * q.ln();
            }
            if m > 0.0 {
                acc += m * (1.0 - q).ln();
            }
        }
        acc / self.norm
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; p.len()];
        for ((row, &k), &m) in self.rows.iter().zip(&self.even).zip(&self.odd) {
            let q = self.q(row, p);
            let mut s = 0.0;
            if k > 0.0 {
                s += k / q;
            }
            if m > 0.0 {
                s -= m / (1.0 - q);
            }
            for (gj, a) in g.iter_mut().zip(row) {
                *gj += s * a / 2.0;
            }
        }
        for v in &mut g {
            *v /= self.norm;
        }
        g
    }
}

/// Euclidean projection onto `{x >= 0, sum x = mass}`.
pub(crate) fn project_simplex(v: &[f64], mass: f64) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        acc += uj;
        let t = (acc - mass) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

struct Ascent {
    iterations: usize,
    grad_norm: f64,
    converged: bool,
}

/// Projected-gradient ascent over the coordinates `free`, which are kept on
/// a simplex of total `mass`; Barzilai-Borwein steps with Armijo backtracking.
fn ascend(lik: &Likelihood, p: &mut [f64], free: &[usize], mass: f64, tol: f64, max_iter: usize) -> Ascent {
    let sub = |p: &[f64]| free.iter().map(|&i| p[i]).collect::<Vec<f64>>();
    let set = |p: &mut [f64], x: &[f64]| {
        for (&i, &v) in free.iter().zip(x) {
            p[i] = v;
        }
    };
    if free.len() <= 1 {
        if let Some(&i) = free.first() {
            p[i] = mass;
        }
        return Ascent {
            iterations: 0,
            grad_norm: 0.0,
            converged: true,
        };
    }
    let mapping_norm = |x: &[f64], g: &[f64]| {
        let stepped: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + b).collect();
        project_simplex(&stepped, mass)
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut x = sub(p);
    let mut f = lik.value(p);
    let mut g = sub(&lik.gradient(p));
    let mut step = 1.0;
    let mut trial = p.to_vec();
    for it in 0..max_iter {
        let norm = mapping_norm(&x, &g);
        if norm < tol {
            return Ascent {
                iterations: it,
                grad_norm: norm,
                converged: true,
            };
        }
        let mut accepted = None;
        let mut alpha = step;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + alpha * b).collect();
            let cand = project_simplex(&cand, mass);
            set(&mut trial, &cand);
            let fc = lik.value(&trial);
            let gain: f64 = g.iter().zip(cand.iter().zip(&x)).map(|(gi, (c, xi))| gi * (c - xi)).sum();
            if fc.is_finite() && fc >= f + 1e-4 * gain {
                accepted = Some((cand, fc));
                break;
            }
            alpha /= 2.0;
        }
        let Some((cand, fc)) = accepted else {
            return Ascent {
                iterations: it,
                grad_norm: norm,
                converged: false,
            };
        };
        let gc = sub(&lik.gradient(&trial));
        let s: Vec<f64> = cand.iter().zip(&x).map(|(a, b)| a - b).collect();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        // Ascent on f is descent on -f: y = -(g_new - g_old).
        let sy: f64 = s.iter().zip(gc.iter().zip(&g)).map(|(si, (a, b))| -si * (a - b)).sum();
        step = if sy > 0.0 { (ss / sy).clamp(1e-10, 1e10) } else { (alpha * 2.0).min(1e10) };
        x = cand;
        f = fc;
        g = gc;
        set(p, &x);
    }
    let norm = mapping_norm(&x, &g);
    Ascent {
        iterations: max_iter,
        grad_norm: norm,
        converged: norm < tol,
    }
}

/// Maximises the parity likelihood over the simplex.
///
/// `counts[w]` and `totals[w]` are the even-parity count and trial count at
/// weight `w` (index 0 is ignored). Counts may be fractional.
pub fn mle_fit(counts: &[f64], totals: &[u64], opts: &MleOptions) -> Result<MLFit> {
    if counts.len() != totals.len() || counts.len() < 2 {
        return Err(Error::InvalidArgument("need matching counts and totals for w' = 1..n".into()));
    }
    let n = counts.len() - 1;
    for (w, (&k, &t)) in counts.iter().zip(totals).enumerate().skip(1) {
        if !(0.0..=t as f64).contains(&k) {
            return Err(Error::InvalidArgument(format!("count {k} at w' = {w} outside [0, {t}]")));
        }
    }
    let norm: f64 = totals[1..].iter().map(|&t| t as f64).sum();
    if norm == 0.0 {
        return Err(Error::DegenerateCounts("no trials at any weight".into()));
    }
    let omega = omega::<f64>(n)?;
    let lik = Likelihood {
        rows: (1..=n).map(|w| omega.row(w).to_vec()).collect(),
        even: counts[1..].to_vec(),
        odd: counts[1..].iter().zip(&totals[1..]).map(|(k, &t)| t as f64 - k).collect(),
        norm,
    };

    // Start from the projected linear inversion, pulled into the interior.
    let c: Vec<f64> = std::iter::once(1.0)
        .chain(
            counts[1..]
                .iter()
                .zip(&totals[1..])
                .map(|(&k, &t)| if t == 0 { 0.0 } else { 2.0 * k / t as f64 - 1.0 }),
        )
        .collect();
    let linear = crate::omega::omega_inv::<f64>(n)?.apply(&c)?;
    let uniform = 1.0 / (n + 1) as f64;
    let mut p: Vec<f64> = project_simplex(&linear, 1.0)
        .iter()
        .map(|v| 0.9 * v + 0.1 * uniform)
        .collect();
    let all: Vec<usize> = (0..=n).collect();
    let run = ascend(&lik, &mut p, &all, 1.0, opts.tolerance, opts.max_iterations);
    if !run.converged {
        return Err(Error::NonConvergence {
            p_last: p,
            grad_norm: run.grad_norm,
        });
    }
    let f_max = lik.value(&p);
    let log_likelihood = f_max * norm;
    let contours = if opts.contours && (2..=MAX_CONTOUR_QUBITS).contains(&n) {
        trace_contours(&lik, &p, f_max, opts)?
    } else {
        Vec::new()
    };
    Ok(MLFit {
        p_hat: WeightDistribution::new(p)?,
        log_likelihood,
        contours,
        levels: opts.levels.clone(),
        converged: true,
        iterations: run.iterations,
        grad_norm: run.grad_norm,
    })
}

/// Profile maximum with `p[i] = a`, `p[j] = b`; returns the per-trial
/// log-likelihood and the maximising point.
fn profile(lik: &Likelihood, center: &[f64], (i, j): (usize, usize), a: f64, b: f64) -> (f64, Vec<f64>) {
    let free: Vec<usize> = (0..center.len()).filter(|&k| k != i && k != j).collect();
    let mass = (1.0 - a - b).max(0.0);
    let free_total: f64 = free.iter().map(|&k| center[k]).sum();
    let mut p = center.to_vec();
    p[i] = a;
    p[j] = b;
    for &k in &free {
        p[k] = if free_total > 0.0 {
            center[k] / free_total * mass
        } else {
            mass / free.len() as f64
        };
    }
    ascend(lik, &mut p, &free, mass, 1e-10, 2000);
    (lik.value(&p), p)
}

fn trace_contours(lik: &Likelihood, p_hat: &[f64], f_max: f64, opts: &MleOptions) -> Result<Vec<Contour>> {
    let n = p_hat.len() - 1;
    let chi = ChiSquared::new(n as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut out = Vec::new();
    for &level in &opts.levels {
        if !(0.0 < level && level < 1.0) {
            return Err(Error::InvalidArgument(format!("confidence level {level} not in (0, 1)")));
        }
        // 2 N (f_max - f) <= quantile, in per-trial units.
        let budget = chi.inverse_cdf(level) / (2.0 * lik.norm);
        for i in 1..=n {
            for j in i + 1..=n {
                let pair = (i, j);
                let mut points = Vec::with_capacity(opts.rays + 1);
                for r in 0..opts.rays {
                    let theta = 2.0 * std::f64::consts::PI * r as f64 / opts.rays as f64;
                    points.push(ray_point(lik, p_hat, pair, theta, f_max - budget));
                }
                if let Some(first) = points.first().cloned() {
                    points.push(first);
                }
                out.push(Contour { level, pair, points });
            }
        }
    }
    Ok(out)
}

/// Walks from the MLE along `theta` in the `(p_i, p_j)` plane to where the
/// profile log-likelihood drops to `floor`, stopping at the simplex boundary.
fn ray_point(lik: &Likelihood, p_hat: &[f64], (i, j): (usize, usize), theta: f64, floor: f64) -> Vec<f64> {
    let (a0, b0) = (p_hat[i], p_hat[j]);
    let (da, db) = (theta.cos(), theta.sin());
    let mut t_max = f64::INFINITY;
    for (x, d) in [(a0, da), (b0, db)] {
        if d < 0.0 {
            t_max = t_max.min(-x / d);
        }
    }
    if da + db > 0.0 {
        t_max = t_max.min((1.0 - a0 - b0) / (da + db));
    }
    let t_max = t_max.max(0.0);
    let at = |t: f64| profile(lik, p_hat, (i, j), (a0 + t * da).max(0.0), (b0 + t * db).max(0.0));
    let (f_edge, p_edge) = at(t_max);
    if f_edge >= floor {
        return p_edge;
    }
    let (mut lo, mut hi) = (0.0, t_max);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if at(mid).0 >= floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo).1
}
