// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::CLIFFORD_COUNT;

/// Measured bitstring; character `q` of the text form is qubit `q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, q: usize) -> bool {
        self.0[q]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn hamming_weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad outcome bit `{c}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Input configuration of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputKind {
    /// `|0...0>` with a full projective readout.
    #[serde(rename = "zero")]
    ZeroState,
    /// `Z^{⊗w'} ⊗ I` deviation with an expectation-value readout.
    #[serde(rename = "zw")]
    ZWeight(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Outcome {
    Bits(Bits),
    Sign(i8),
}

/// One protocol shot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialRecord {
    #[serde(rename = "t")]
    pub trial_index: u64,
    #[serde(rename = "c")]
    pub clifford_ids: Vec<u8>,
    #[serde(rename = "pi", default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
    #[serde(rename = "in")]
    pub input: InputKind,
    #[serde(rename = "out")]
    pub outcome: Outcome,
    #[serde(rename = "ref")]
    pub is_reference: bool,
}

impl TrialRecord {
    pub fn num_qubits(&self) -> usize {
        self.clifford_ids.len()
    }

    /// Checks the record's internal consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_qubits();
        if self.clifford_ids.iter().any(|&id| id as usize >= CLIFFORD_COUNT) {
            return Err(Error::Parse(format!("trial {}: Clifford id out of range", self.trial_index)));
        }
        match (&self.input, &self.outcome, &self.permutation) {
            (InputKind::ZeroState, Outcome::Bits(b), None) if b.len() == n => Ok(()),
            (InputKind::ZWeight(w), Outcome::Sign(s), Some(pi))
                if (1..=n).contains(w) && (*s == 1 || *s == -1) && pi.len() == n =>
            {
                let mut seen = vec![false; n];
                for &m in pi {
                    if m >= n || std::mem::replace(&mut seen[m], true) {
                        return Err(Error::Parse(format!(
                            "trial {}: permutation is not a bijection",
                            self.trial_index
                        )));
                    }
                }
                Ok(())
            }
            _ => Err(Error::Parse(format!(
                "trial {}: outcome does not match input kind",
                self.trial_index
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_record_line() {
        let r = TrialRecord {
            trial_index: 3,
            clifford_ids: vec![0, 23],
            permutation: None,
            input: InputKind::ZeroState,
            outcome: Outcome::Bits("01".parse().unwrap()),
            is_reference: false,
        };
        let line = serde_json::to_string(&r).unwrap();
        assert_eq!(line, r#"{"t":3,"c":[0,23],"in":"zero","out":"01","ref":false}"#);
        assert_eq!(serde_json::from_str::<TrialRecord>(&line).unwrap(), r);
        r.validate().unwrap();
    }

    #[test]
    fn ensemble_record_line() {
        let r = TrialRecord {
            trial_index: 0,
            clifford_ids: vec![5, 1, 2],
            permutation: Some(vec![2, 0, 1]),
            input: InputKind::ZWeight(2),
            outcome: Outcome::Sign(-1),
            is_reference: true,
        };
        let line = serde_json::to_string(&r).unwrap();
        assert_eq!(
            line,
            r#"{"t":0,"c":[5,1,2],"pi":[2,0,1],"in":{"zw":2},"out":-1,"ref":true}"#
        );
        assert_eq!(serde_json::from_str::<TrialRecord>(&line).unwrap(), r);
        r.validate().unwrap();
    }

    #[test]
    fn inconsistent_records_are_rejected() {
        let mut r = TrialRecord {
            trial_index: 0,
            clifford_ids: vec![0, 0],
            permutation: None,
            input: InputKind::ZeroState,
            outcome: Outcome::Sign(1),
            is_reference: false,
        };
        assert!(r.validate().is_err());
        r.outcome = Outcome::Bits("011".parse().unwrap());
        assert!(r.validate().is_err());
        r.outcome = Outcome::Bits("01".parse().unwrap());
        r.clifford_ids = vec![0, 24];
        assert!(r.validate().is_err());
        assert!("012".parse::<Bits>().is_err());
    }
}
