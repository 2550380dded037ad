// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Bit-packed symplectic representation of n-qubit Pauli operators.

mod clifford;
mod permutation;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use clifford::{
    enumerate_cliffords, sample_clifford_layer, sample_uniform_clifford_layer, CliffordLayer,
    SingleQubitClifford, CLIFFORD_COUNT,
};
pub use permutation::{permute, QubitPermutation};

/// Soft cap on register size for mask operations.
pub const MAX_QUBITS: usize = 4096;

const WORD: usize = 64;

/// Single-qubit Pauli factor, encoded as `(x, z)` bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product `self * other = i^k * result`, returned as `(k mod 4, result)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }
}

/// Hermitian n-qubit Pauli operator with a sign in {+1, -1}.
///
/// Site `j` is encoded by bit `j` of the `x` and `z` masks; `(1, 1)` is `Y`
/// itself (not `XZ`), so every value is Hermitian.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    negative: bool,
}

fn words(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: vec![0; words(n)],
            z: vec![0; words(n)],
            negative: false,
        }
    }

    /// Builds a string from `(site, factor)` pairs; unspecified sites are `I`.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n);
        for &(site, factor) in sites {
            if site >= n {
                return Err(Error::InvalidArgument(format!(
                    "site {site} out of range for {n} qubits"
                )));
            }
            p.set(site, factor);
        }
        Ok(p)
    }

    /// `Z` on every site of `sites`.
    pub fn z_on(n: usize, sites: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::identity(n);
        for s in sites {
            p.set(s, Pauli::Z);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// Same operator with sign +1.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.negative = false;
        p
    }

    pub fn get(&self, site: usize) -> Pauli {
        let (w, b) = (site / WORD, site % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, site: usize, factor: Pauli) {
        assert!(site < self.n, "site {site} out of range");
        let (w, b) = (site / WORD, site % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | (u64::from(factor.x_bit()) << b);
        self.z[w] = (self.z[w] & !mask) | (u64::from(factor.z_bit()) << b);
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, site: usize) -> bool {
        (self.x[site / WORD] >> (site % WORD)) & 1 == 1
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Sites carrying a non-identity factor, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&s| self.get(s) != Pauli::I).collect()
    }

    /// Symplectic commutation test.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        Error::check_size(self.n, other.n)?;
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= (self.x[i] & other.z[i]).count_ones() & 1;
            parity ^= (self.z[i] & other.x[i]).count_ones() & 1;
        }
        Ok(parity == 0)
    }

    /// Operator product with the phase discarded (sign +1).
    pub fn mul_unsigned(&self, other: &Self) -> Result<Self> {
        Error::check_size(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
            negative: false,
        })
    }

    /// Iterates over all `4^n` sign-free Pauli strings in a fixed order.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 16, "enumerating 4^{n} Paulis is not supported");
        (0u64..(1u64 << (2 * n))).map(move |code| {
            let mut p = PauliString::identity(n);
            for site in 0..n {
                let f = match (code >> (2 * site)) & 3 {
                    0 => Pauli::I,
                    1 => Pauli::X,
                    2 => Pauli::Y,
                    _ => Pauli::Z,
                };
                p.set(site, f);
            }
            p
        })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        for s in 0..self.n {
            write!(f, "{}", self.get(s).to_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = if let Some(rest) = s.strip_prefix('-') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('\u{2212}') {
            (true, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (false, rest)
        } else {
            (false, s)
        };
        let n = body.chars().count();
        if n == 0 {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        if n > MAX_QUBITS {
            return Err(Error::TooLarge {
                what: "PauliString",
                n,
                max: MAX_QUBITS,
            });
        }
        let mut p = PauliString::identity(n);
        for (site, c) in body.chars().enumerate() {
            let f = Pauli::from_char(c)
                .ok_or_else(|| Error::Parse(format!("bad Pauli factor `{c}` in `{s}`")))?;
            p.set(site, f);
        }
        p.negative = negative;
        Ok(p)
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
