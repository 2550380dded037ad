// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_version, FORMAT_VERSION};
use crate::channel::{depolarizing_product, engineered_channel, KrausChannel, PauliChannel};
use crate::dense::CMatrix;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::twirl::NoiseChannel;

/// Channel description shared by channel files and inline config tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Pauli string to probability.
    Pauli { terms: BTreeMap<String, f64> },
    /// Row-major matrices of `[re, im]` pairs.
    Kraus { operators: Vec<Vec<Vec<[f64; 2]>>> },
    Fixture { fixture_id: String },
    /// Product of single-qubit depolarizing channels.
    Depolarizing { per_qubit: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(flatten)]
    pub spec: ChannelSpec,
    /// Compose the channel with itself this many times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repeat: Option<u32>,
}

/// A channel given inline or as a path to a JSON channel document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelRef {
    File { file: PathBuf },
    Inline(ChannelDocument),
}

impl ChannelDocument {
    pub fn new(spec: ChannelSpec) -> Self {
        Self {
            format_version: Some(FORMAT_VERSION),
            n: None,
            spec,
            repeat: None,
        }
    }

    pub fn build(&self) -> Result<NoiseChannel> {
        if let Some(v) = self.format_version {
            check_version("channel", v)?;
        }
        let channel = match &self.spec {
            ChannelSpec::Pauli { terms } => {
                let parsed = terms
                    .iter()
                    .map(|(k, &v)| Ok((k.parse::<PauliString>()?, v)))
                    .collect::<Result<Vec<_>>>()?;
                let n = match (self.n, parsed.first()) {
                    (Some(n), _) => n,
                    (None, Some((p, _))) => p.num_qubits(),
                    (None, None) => return Err(Error::InvalidArgument("Pauli channel has no terms".into())),
                };
                NoiseChannel::Pauli(PauliChannel::new(n, parsed)?)
            }
            ChannelSpec::Kraus { operators } => {
                let first = operators
                    .first()
                    .ok_or_else(|| Error::InvalidArgument("Kraus channel has no operators".into()))?;
                let d = first.len();
                if !d.is_power_of_two() || d < 2 {
                    return Err(Error::InvalidArgument(format!("Kraus dimension {d} is not 2^n")));
                }
                let n = d.trailing_zeros() as usize;
                let mats = operators
                    .iter()
                    .map(|rows| {
                        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                            return Err(Error::InvalidArgument("Kraus operators must be square and equal-sized".into()));
                        }
                        Ok(CMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let k = KrausChannel::new(n, mats)?;
                let check = k.validate();
                if !check.pass {
                    return Err(Error::NotTracePreserving {
                        deviation: check.deviation,
                    });
                }
                NoiseChannel::Kraus(k)
            }
            ChannelSpec::Fixture { fixture_id } => NoiseChannel::Kraus(engineered_channel(fixture_id)?),
            ChannelSpec::Depolarizing { per_qubit } => NoiseChannel::Pauli(depolarizing_product(per_qubit)?),
        };
        if let Some(n) = self.n {
            Error::check_size(n, channel.num_qubits())?;
        }
        match self.repeat {
            None | Some(1) => Ok(channel),
            Some(0) => Err(Error::InvalidArgument("repeat must be at least 1".into())),
            Some(m) => Ok(match channel {
                NoiseChannel::Pauli(p) => NoiseChannel::Pauli(p.power(m)?),
                NoiseChannel::Kraus(k) => {
                    let mut acc = k.clone();
                    for _ in 1..m {
                        acc = acc.compose(&k)?;
                    }
                    NoiseChannel::Kraus(acc)
                }
            }),
        }
    }
}

impl ChannelRef {
    /// Resolves file references relative to `base`.
    pub fn load(&self, base: &Path) -> Result<ChannelDocument> {
        match self {
            ChannelRef::Inline(doc) => Ok(doc.clone()),
            ChannelRef::File { file } => {
                let path = base.join(file);
                let text = std::fs::read_to_string(&path)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }
}
