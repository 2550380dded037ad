// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Report;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlotKind {
    /// Confidence-region polylines: `level,pair_i,pair_j,point,p0..pn`.
    Contours,
    /// `w,p_w,sigma_w,p_mle`.
    Weights,
    /// `w,c_w,stderr_w,c1^w`.
    CScaling,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "contours" => Ok(Self::Contours),
            "weights" => Ok(Self::Weights),
            "c-scaling" => Ok(Self::CScaling),
            _ => Err(Error::Parse(format!("unknown plot kind `{s}`"))),
        }
    }
}

/// CSV text for one plot. Fails with `MissingSection` when the report lacks
/// the data (no MLE fit for contours, for instance).
pub fn emit_plot_data(report: &Report, kind: PlotKind) -> Result<String> {
    let n = report.n();
    let mut out = String::new();
    match kind {
        PlotKind::Contours => {
            if report.contours.is_empty() {
                return Err(Error::MissingSection("contours".into()));
            }
            out.push_str("level,pair_i,pair_j,point");
            for w in 0..=n {
                let _ = write!(out, ",p{w}");
            }
            out.push('\n');
            for c in &report.contours {
                for (k, pt) in c.points.iter().enumerate() {
                    let _ = write!(out, "{},{},{},{k}", c.level, c.pair.0, c.pair.1);
                    for v in pt {
                        let _ = write!(out, ",{v}");
                    }
                    out.push('\n');
                }
            }
        }
        PlotKind::Weights => {
            if report.p_linear.len() != n + 1 {
                return Err(Error::MissingSection("p_linear".into()));
            }
            out.push_str("w,p_w,sigma_w,p_mle\n");
            for w in 0..=n {
                let mle = report.p_mle.as_ref().map(|p| p[w].to_string()).unwrap_or_default();
                let _ = writeln!(out, "{w},{},{},{mle}", report.p_linear[w], report.p_linear_stderr[w]);
            }
        }
        PlotKind::CScaling => {
            let c = &report.estimate.c_hat;
            if c.len() != n + 1 || n == 0 {
                return Err(Error::MissingSection("c_hat".into()));
            }
            out.push_str("w,c_w,stderr_w,c1^w\n");
            for w in 0..=n {
                let _ = writeln!(out, "{w},{},{},{}", c[w], report.estimate.stderr[w], c[1].powi(w as i32));
            }
        }
    }
    Ok(out)
}
