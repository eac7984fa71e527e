//! Majorana operators as Pauli strings (Jordan–Wigner) and sector matrices.
//!
//! Majoranas are indexed from zero: `χ_{2k} = Z_0⋯Z_{k−1} X_k` and
//! `χ_{2k+1} = Z_0⋯Z_{k−1} Y_k`, acting on `N/2` qubits with `χ² = 1`.
//! Qubit `k` is bit `k` of a computational basis state.

use alloc::vec::Vec;
use core::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{bail, Result};
use crate::matrix::HermitianMatrix;

/// Powers of `i`, indexed by exponent mod 4.
const I_POW: [(f64, f64); 4] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)];

/// `i^phase · X^x · Z^z` on `n_qubits` qubits, with the `X` factor to the left
/// on every qubit. A `Y` is therefore stored as `i·XZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub n_qubits: u32,
    pub x: u64,
    pub z: u64,
    phase: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(n_qubits: u32) -> Self {
        Self { n_qubits, x: 0, z: 0, phase: 0 }
    }

    pub fn new(n_qubits: u32, x: u64, z: u64, phase: u8) -> Result<Self> {
        if n_qubits > 64 {
            bail!(Parameter, "at most 64 qubits supported, got {n_qubits}");
        }
        let mask = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        if x & !mask != 0 || z & !mask != 0 {
            bail!(Parameter, "mask bits beyond qubit {n_qubits}");
        }
        Ok(Self { n_qubits, x, z, phase: phase & 3 })
    }

    /// Exponent `p` of the overall `i^p` in front of the letter product.
    pub fn letter_phase(&self) -> u8 {
        (self.phase + 4 - (self.x & self.z).count_ones() as u8 % 4) & 3
    }

    pub fn letter(&self, k: u32) -> Pauli {
        match ((self.x >> k) & 1, (self.z >> k) & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.letter_phase() % 2 == 0
    }

    /// True when the string maps each parity sector to itself.
    pub fn preserves_parity(&self) -> bool {
        self.x.count_ones() % 2 == 0
    }

    pub fn scaled_by_i(mut self, power: u8) -> Self {
        self.phase = (self.phase + power) & 3;
        self
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.n_qubits != other.n_qubits {
            bail!(SizeMismatch, "{} vs {} qubits", self.n_qubits, other.n_qubits);
        }
        // Z^{z1} X^{x2} = (−1)^{z1·x2} X^{x2} Z^{z1}
        let sign = 2 * ((self.z & other.x).count_ones() % 2) as u8;
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (self.phase + other.phase + sign) & 3,
        })
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            bail!(SizeMismatch, "{} vs {} qubits", self.n_qubits, other.n_qubits);
        }
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(s % 2 == 0)
    }

    /// Image of basis state `b`: `P|b⟩ = c·|b ⊕ x⟩`.
    #[inline]
    pub fn apply(&self, b: u64) -> (u64, c64) {
        let sign = 2 * ((self.z & b).count_ones() % 2) as usize;
        let (re, im) = I_POW[(self.phase as usize + sign) & 3];
        (b ^ self.x, c64::new(re, im))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.letter_phase() as usize];
        write!(f, "{prefix}")?;
        for k in 0..self.n_qubits {
            let c = match self.letter(k) {
                Pauli::I => 'I',
                Pauli::X => 'X',
                Pauli::Y => 'Y',
                Pauli::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn check_fermions(n_fermions: usize) -> Result<u32> {
    if n_fermions < 2 || n_fermions % 2 != 0 || n_fermions > 128 {
        bail!(Parameter, "N={n_fermions} must be even and in [2, 128]");
    }
    Ok((n_fermions / 2) as u32)
}

/// Single Majorana `χ_i` for `i` in `0..N`.
pub fn majorana(i: usize, n_fermions: usize) -> Result<PauliString> {
    let nq = check_fermions(n_fermions)?;
    if i >= n_fermions {
        bail!(Parameter, "Majorana index {i} out of range for N={n_fermions}");
    }
    let k = (i / 2) as u32;
    let tail = (1u64 << k) - 1;
    let s = PauliString::new(nq, 1 << k, tail, 0)?;
    Ok(if i % 2 == 0 { s } else { PauliString { z: tail | (1 << k), phase: 1, ..s } })
}

/// `Ψ_I = c·χ_{i1}⋯χ_{iq}` for a strictly increasing index list, with
/// `c = i^{q(q−1)/2 mod 2}` so that the string is Hermitian.
pub fn majorana_string(indices: &[usize], n_fermions: usize) -> Result<PauliString> {
    let nq = check_fermions(n_fermions)?;
    for w in indices.windows(2) {
        if w[1] == w[0] {
            bail!(Parameter, "duplicate Majorana index {}", w[0]);
        }
        if w[1] < w[0] {
            bail!(Parameter, "Majorana indices must be sorted");
        }
    }
    let mut acc = PauliString::identity(nq);
    for &i in indices {
        acc = acc.multiply(&majorana(i, n_fermions)?)?;
    }
    let q = indices.len();
    let fix = ((q * q.saturating_sub(1) / 2) % 2) as u8;
    let s = acc.scaled_by_i(fix);
    debug_assert!(s.is_hermitian());
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
    Full,
}

impl Sector {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
            Sector::Full => "full",
        }
    }
}

impl core::str::FromStr for Sector {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            "full" => Ok(Sector::Full),
            _ => bail!(Parameter, "unknown sector '{s}'"),
        }
    }
}

/// Basis states of a sector in increasing order, with the inverse map.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    pub states: Vec<u64>,
    index: Vec<u32>,
}

impl SectorBasis {
    pub fn new(n_qubits: u32, sector: Sector) -> Result<Self> {
        if n_qubits > 24 {
            bail!(Parameter, "{n_qubits} qubits is beyond dense exact diagonalization");
        }
        let full = 1u64 << n_qubits;
        let mut index = alloc::vec![u32::MAX; full as usize];
        let mut states = Vec::new();
        for b in 0..full {
            let keep = match sector {
                Sector::Full => true,
                Sector::Even => b.count_ones() % 2 == 0,
                Sector::Odd => b.count_ones() % 2 == 1,
            };
            if keep {
                index[b as usize] = states.len() as u32;
                states.push(b);
            }
        }
        Ok(Self { states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, b: u64) -> Option<usize> {
        match self.index.get(b as usize) {
            Some(&i) if i != u32::MAX => Some(i as usize),
            _ => None,
        }
    }
}

/// Dense `Σ_k J_k P_k` restricted to a parity sector.
pub fn sector_matrix(terms: &[(f64, PauliString)], sector: Sector, n_fermions: usize) -> Result<HermitianMatrix> {
    let nq = check_fermions(n_fermions)?;
    for (k, (_, p)) in terms.iter().enumerate() {
        if p.n_qubits != nq {
            bail!(SizeMismatch, "term {k} acts on {} qubits, expected {nq}", p.n_qubits);
        }
        if !p.is_hermitian() {
            bail!(Parameter, "term {k} ({p}) is not Hermitian");
        }
        if sector != Sector::Full && !p.preserves_parity() {
            bail!(ParityViolation, "term {k} ({p}) flips fermion parity");
        }
    }
    let basis = SectorBasis::new(nq, sector)?;
    let d = basis.dim();
    let mut m = Mat::<c64>::zeros(d, d);
    for (col, &b) in basis.states.iter().enumerate() {
        for (j, p) in terms {
            let (bp, c) = p.apply(b);
            let row = basis.index_of(bp).expect("parity-preserving term stays in sector");
            m[(row, col)] += c * *j;
        }
    }
    Ok(HermitianMatrix::from_complex(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    #[serde(rename = "GOE")]
    Goe,
    #[serde(rename = "GUE")]
    Gue,
    #[serde(rename = "GSE")]
    Gse,
}

impl SymmetryClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SymmetryClass::Goe => "GOE",
            SymmetryClass::Gue => "GUE",
            SymmetryClass::Gse => "GSE",
        }
    }
}

/// Random-matrix class of one parity sector of the undeformed model.
pub fn symmetry_class(n_fermions: usize) -> Result<SymmetryClass> {
    if n_fermions % 2 != 0 || n_fermions == 0 {
        bail!(Parameter, "N={n_fermions} must be even and positive");
    }
    Ok(match n_fermions % 8 {
        0 => SymmetryClass::Goe,
        4 => SymmetryClass::Gse,
        _ => SymmetryClass::Gue,
    })
}
