// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! The 24-element single-qubit Clifford group (modulo phase) and tensor
//! layers of it.
//!
//! Elements are identified by how they conjugate `X` and `Z`. The canonical
//! id is `4 * xi + zi` where
//!
//! * `xi = 2 * index(image_of_X in [X, Y, Z]) + (1 if the sign is negative)`
//! * `zi = 2 * index(image_of_Z in the remaining entries of [Z, Y, X]) + (1 if negative)`
//!
//! so id 0 is the identity and ids are stable across implementations.

use std::sync::OnceLock;

use rand::Rng;

use super::{Pauli, PauliString};
use crate::error::{Error, Result};
use crate::rng;

pub const CLIFFORD_COUNT: usize = 24;

/// One single-qubit Clifford, stored as its action on `X`, `Y` and `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SingleQubitClifford {
    id: u8,
    x_image: (Pauli, bool),
    y_image: (Pauli, bool),
    z_image: (Pauli, bool),
}

impl SingleQubitClifford {
    fn from_images(id: u8, x_image: (Pauli, bool), z_image: (Pauli, bool)) -> Self {
        // Y = i X Z, so C Y C^dag = i (sx Px)(sz Pz).
        let (k, r) = x_image.0.mul(z_image.0);
        debug_assert!(k % 2 == 1, "images must anticommute");
        // i^(1+k) is -1 for k = 1 and +1 for k = 3.
        let phase_negative = k == 1;
        let negative = x_image.1 ^ z_image.1 ^ phase_negative;
        Self {
            id,
            x_image,
            y_image: (r, negative),
            z_image,
        }
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    /// `(C X C^dag)` as `(factor, negative)`.
    pub fn image_of_x(&self) -> (Pauli, bool) {
        self.x_image
    }

    pub fn image_of_z(&self) -> (Pauli, bool) {
        self.z_image
    }

    pub fn image_of_y(&self) -> (Pauli, bool) {
        self.y_image
    }

    /// Conjugates a single factor: `C P C^dag = (-1)^neg * P'`.
    pub fn conjugate(&self, p: Pauli) -> (Pauli, bool) {
        match p {
            Pauli::I => (Pauli::I, false),
            Pauli::X => self.x_image,
            Pauli::Y => self.y_image,
            Pauli::Z => self.z_image,
        }
    }

    pub fn by_id(id: u8) -> &'static SingleQubitClifford {
        &table().elements[id as usize]
    }

    /// `self ∘ other`: conjugation by `other` followed by `self`.
    pub fn compose(&self, other: &SingleQubitClifford) -> &'static SingleQubitClifford {
        Self::by_id(table().compose[self.id as usize][other.id as usize])
    }

    pub fn inverse(&self) -> &'static SingleQubitClifford {
        Self::by_id(table().inverse[self.id as usize])
    }

    /// True for the four elements that fix `X` and `Z` up to sign.
    pub fn is_pauli(&self) -> bool {
        self.x_image.0 == Pauli::X && self.z_image.0 == Pauli::Z
    }
}

struct Table {
    elements: Vec<SingleQubitClifford>,
    compose: Vec<Vec<u8>>,
    inverse: Vec<u8>,
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

fn build_table() -> Table {
    let mut elements = Vec::with_capacity(CLIFFORD_COUNT);
    for (xp_idx, &xp) in [Pauli::X, Pauli::Y, Pauli::Z].iter().enumerate() {
        for x_neg in [false, true] {
            let candidates: Vec<Pauli> = [Pauli::Z, Pauli::Y, Pauli::X]
                .into_iter()
                .filter(|&p| p != xp)
                .collect();
            for (zp_idx, &zp) in candidates.iter().enumerate() {
                for z_neg in [false, true] {
                    let xi = 2 * xp_idx + usize::from(x_neg);
                    let zi = 2 * zp_idx + usize::from(z_neg);
                    let id = (4 * xi + zi) as u8;
                    elements.push(SingleQubitClifford::from_images(
                        id,
                        (xp, x_neg),
                        (zp, z_neg),
                    ));
                }
            }
        }
    }
    elements.sort_by_key(|e| e.id);

    let find = |x: (Pauli, bool), z: (Pauli, bool)| -> u8 {
        elements
            .iter()
            .find(|e| e.x_image == x && e.z_image == z)
            .map(|e| e.id)
            .expect("images of a Clifford composition are a Clifford")
    };
    let apply = |e: &SingleQubitClifford, (p, neg): (Pauli, bool)| {
        let (q, n2) = e.conjugate(p);
        (q, neg ^ n2)
    };
    let mut compose = vec![vec![0u8; CLIFFORD_COUNT]; CLIFFORD_COUNT];
    for a in &elements {
        for b in &elements {
            let x = apply(a, b.x_image);
            let z = apply(a, b.z_image);
            compose[a.id as usize][b.id as usize] = find(x, z);
        }
    }
    let inverse = (0..CLIFFORD_COUNT)
        .map(|a| {
            (0..CLIFFORD_COUNT)
                .find(|&b| compose[a][b] == 0)
                .expect("group element has an inverse") as u8
        })
        .collect();
    Table {
        elements,
        compose,
        inverse,
    }
}

/// All 24 elements in canonical id order.
pub fn enumerate_cliffords() -> &'static [SingleQubitClifford] {
    &table().elements
}

/// A tensor product of single-qubit Cliffords, one per site.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordLayer {
    ids: Vec<u8>,
}

impl CliffordLayer {
    pub fn new(ids: Vec<u8>) -> Result<Self> {
        if let Some(bad) = ids.iter().find(|&&id| id as usize >= CLIFFORD_COUNT) {
            return Err(Error::InvalidArgument(format!("Clifford id {bad} out of range")));
        }
        Ok(Self { ids })
    }

    pub fn identity(n: usize) -> Self {
        Self { ids: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u8] {
        &self.ids
    }

    pub fn element(&self, site: usize) -> &'static SingleQubitClifford {
        SingleQubitClifford::by_id(self.ids[site])
    }

    /// `C P C^dag`, sign included.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        Error::check_size(self.len(), p.num_qubits())?;
        let mut out = PauliString::identity(p.num_qubits());
        let mut negative = p.is_negative();
        for site in p.support() {
            let (q, neg) = self.element(site).conjugate(p.get(site));
            out.set(site, q);
            negative ^= neg;
        }
        Ok(if negative { out.negated() } else { out })
    }

    pub fn inverse(&self) -> Self {
        Self {
            ids: self
                .ids
                .iter()
                .map(|&id| SingleQubitClifford::by_id(id).inverse().id())
                .collect(),
        }
    }

    /// Sitewise `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Error::check_size(self.len(), other.len())?;
        Ok(Self {
            ids: self
                .ids
                .iter()
                .zip(&other.ids)
                .map(|(&a, &b)| table().compose[a as usize][b as usize])
                .collect(),
        })
    }
}

/// Draws each site independently and uniformly from the 24 elements.
pub fn sample_clifford_layer<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CliffordLayer {
    CliffordLayer {
        ids: (0..n)
            .map(|_| rng.random_range(0..CLIFFORD_COUNT as u8))
            .collect(),
    }
}

/// Deterministic layer for `seed`.
pub fn sample_uniform_clifford_layer(seed: u64, n: usize) -> Result<CliffordLayer> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(sample_clifford_layer(&mut rng::seeded(seed), n))
}
