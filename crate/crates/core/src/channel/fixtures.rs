// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Engineered ground-truth channels, built from `Z` tensor products rather
//! than decimal literals.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::KrausChannel;
use crate::dense::{pauli_matrix, CMatrix};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fixture {
    /// `{Z_1, Z_2} / sqrt(2)` on two qubits.
    Chcl3Z1z2Mix,
    /// `{Z_1 Z_2}` on two qubits.
    Chcl3Zz,
    /// `{exp[i pi/4 (Z_1 + Z_2)]}` on two qubits.
    Chcl3Unitary,
    /// `{Z_1, Z_2, Z_3} / sqrt(3)` on three qubits.
    MalonicZMix,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [
        Fixture::Chcl3Z1z2Mix,
        Fixture::Chcl3Zz,
        Fixture::Chcl3Unitary,
        Fixture::MalonicZMix,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Chcl3Z1z2Mix => "chcl3_z1z2_mix",
            Fixture::Chcl3Zz => "chcl3_zz",
            Fixture::Chcl3Unitary => "chcl3_unitary",
            Fixture::MalonicZMix => "malonic_z_mix",
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            Fixture::MalonicZMix => 3,
            _ => 2,
        }
    }

    pub fn kraus(self) -> KrausChannel {
        let z = |s: &str| pauli_matrix(&s.parse::<PauliString>().expect("valid literal"));
        let scale = |m: CMatrix, f: f64| m * Complex64::new(f, 0.0);
        let ops = match self {
            Fixture::Chcl3Z1z2Mix => {
                let f = std::f64::consts::FRAC_1_SQRT_2;
                vec![scale(z("ZI"), f), scale(z("IZ"), f)]
            }
            Fixture::Chcl3Zz => vec![z("ZZ")],
            Fixture::Chcl3Unitary => {
                // exp(i pi/4 Z) = (I + i Z) / sqrt(2) on each qubit.
                let f = std::f64::consts::FRAC_1_SQRT_2;
                let one = pauli_matrix(&PauliString::identity(1));
                let zz = pauli_matrix(&"Z".parse::<PauliString>().expect("valid literal"));
                let local = (one + zz * Complex64::i()) * Complex64::new(f, 0.0);
                vec![local.kronecker(&local)]
            }
            Fixture::MalonicZMix => {
                let f = 1.0 / 3f64.sqrt();
                vec![scale(z("ZII"), f), scale(z("IZI"), f), scale(z("IIZ"), f)]
            }
        };
        KrausChannel::new(self.num_qubits(), ops).expect("fixture shapes are consistent")
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

pub fn engineered_channel(id: &str) -> Result<KrausChannel> {
    Ok(id.parse::<Fixture>()?.kraus())
}
