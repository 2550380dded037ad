// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

//! Dense complex matrices for small registers.
//!
//! Site 0 is the leftmost (most significant) tensor factor, so basis index
//! `j` has qubit `q` in bit `n - 1 - q`.

use std::collections::VecDeque;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{enumerate_cliffords, CliffordLayer, Pauli, PauliString, CLIFFORD_COUNT};

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single_pauli(p: Pauli) -> CMatrix {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        Pauli::I => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn hadamard() -> CMatrix {
    let h = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

pub fn phase_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)])
}

/// Kronecker product of a sequence, first factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(CMatrix::identity(1, 1), |acc, f| acc.kronecker(f))
}

/// Full `2^n x 2^n` matrix of a signed Pauli string.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    let factors: Vec<CMatrix> = (0..p.num_qubits()).map(|s| single_pauli(p.get(s))).collect();
    let m = kron_all(&factors);
    if p.is_negative() {
        -m
    } else {
        m
    }
}

/// A unitary representative (up to phase) of Clifford `id`.
pub fn clifford_unitary(id: u8) -> CMatrix {
    clifford_unitaries()[id as usize].clone()
}

pub fn layer_unitary(layer: &CliffordLayer) -> CMatrix {
    let factors: Vec<CMatrix> = layer.ids().iter().map(|&id| clifford_unitary(id)).collect();
    kron_all(&factors)
}

fn clifford_unitaries() -> &'static [CMatrix] {
    static CACHE: OnceLock<Vec<CMatrix>> = OnceLock::new();
    CACHE.get_or_init(build_clifford_unitaries)
}

/// Image of a single-qubit Pauli under `u`, read off by matrix comparison.
fn dense_image(u: &CMatrix, p: Pauli) -> (Pauli, bool) {
    let m = u * single_pauli(p) * u.adjoint();
    for q in Pauli::NON_IDENTITY {
        let qm = single_pauli(q);
        if (&m - &qm).norm() < 1e-9 {
            return (q, false);
        }
        if (&m + &qm).norm() < 1e-9 {
            return (q, true);
        }
    }
    panic!("matrix is not a Clifford");
}

/// Breadth-first search over words in `H` and `S` until every table entry
/// has a matrix whose conjugation action matches it.
fn build_clifford_unitaries() -> Vec<CMatrix> {
    let table = enumerate_cliffords();
    let mut found: Vec<Option<CMatrix>> = vec![None; CLIFFORD_COUNT];
    let mut queue = VecDeque::from([CMatrix::identity(2, 2)]);
    let gens = [hadamard(), phase_gate()];
    while let Some(u) = queue.pop_front() {
        let key = (dense_image(&u, Pauli::X), dense_image(&u, Pauli::Z));
        let idx = table
            .iter()
            .position(|e| (e.image_of_x(), e.image_of_z()) == key)
            .expect("every H/S word is in the table");
        if found[idx].is_some() {
            continue;
        }
        for g in &gens {
            queue.push_back(g * &u);
        }
        found[idx] = Some(u);
        if found.iter().all(Option::is_some) {
            break;
        }
    }
    found.into_iter().map(|u| u.expect("H and S generate the group")).collect()
}
