//! Full spectra of dense Hermitian matrices and Kramers deduplication.

use alloc::string::String;
use alloc::vec::Vec;

use faer::{Mat, Side};
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::error::{bail, Error, Result};
use crate::majorana::{symmetry_class, Sector, SymmetryClass};
use crate::matrix::HermitianMatrix;
use crate::syk::{Deformation, SykConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMeta {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    pub mu: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub seed: u64,
    pub sector: Sector,
    pub class: SymmetryClass,
    pub deformation: String,
    pub convention: String,
    #[serde(default)]
    pub kramers_deduped: bool,
}

impl SpectrumMeta {
    /// Metadata of the spectrum of `config`. Deformations break every
    /// antiunitary symmetry, so deformed spectra are labelled GUE.
    pub fn for_config(config: &SykConfig) -> Result<Self> {
        let class = if config.deformation == Deformation::None {
            symmetry_class(config.n)?
        } else {
            SymmetryClass::Gue
        };
        Ok(Self {
            n: config.n,
            q: config.q,
            mu: config.mu,
            j: config.j,
            seed: config.seed,
            sector: config.sector,
            class,
            deformation: config.deformation.label(),
            convention: String::from(crate::CONVENTION_TAG),
            kramers_deduped: false,
        })
    }

    /// `N{N}_q{q}_mu{mu}_s{seed}`.
    pub fn file_stem(&self) -> String {
        alloc::format!("N{}_q{}_mu{}_s{}", self.n, self.q, self.mu, self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub meta: SpectrumMeta,
    pub eigenvalues: Vec<f64>,
}

fn check_hermitian(h: &HermitianMatrix) -> Result<()> {
    let scale = h.max_abs_entry().max(1.0);
    let defect = h.hermiticity_defect();
    if !(defect <= 1e-10 * scale) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &HermitianMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let vals = match h {
        HermitianMatrix::Real(m) => m.self_adjoint_eigenvalues(Side::Lower),
        HermitianMatrix::Complex(m) => m.self_adjoint_eigenvalues(Side::Lower),
    }
    .map_err(|_| Error::NoConvergence)?;
    Ok(vals)
}

/// Sorted eigenvalues and the matching orthonormal eigenvectors (columns).
pub fn eigh(h: &HermitianMatrix) -> Result<(Vec<f64>, Mat<c64>)> {
    check_hermitian(h)?;
    let m = h.to_complex();
    let e = m.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let s = e.S();
    let vals = (0..m.nrows()).map(|i| s[i].re).collect();
    Ok((vals, e.U().to_owned()))
}

/// Largest `‖H v − λ v‖` over the eigenpairs.
pub fn max_residual(h: &HermitianMatrix, vals: &[f64], vecs: &Mat<c64>) -> f64 {
    let m = h.to_complex();
    let hv = &m * vecs;
    let mut worst: f64 = 0.0;
    for (k, &l) in vals.iter().enumerate() {
        let r: f64 = (0..m.nrows()).map(|i| (hv[(i, k)] - vecs[(i, k)] * l).norm_sqr()).sum();
        worst = worst.max(r.sqrt());
    }
    worst
}

pub fn full_spectrum(h: &HermitianMatrix, meta: SpectrumMeta) -> Result<Spectrum> {
    Ok(Spectrum { meta, eigenvalues: eigenvalues(h)? })
}

/// Default relative tolerance for pairing Kramers doublets.
pub const KRAMERS_REL_TOL: f64 = 1e-9;

/// Keeps one level of every Kramers pair of a GSE spectrum. Pairs are
/// adjacent levels closer than `rel_tol` times the spectral radius.
pub fn dedupe_kramers(spectrum: &Spectrum, rel_tol: f64) -> Result<Spectrum> {
    if spectrum.meta.class != SymmetryClass::Gse {
        bail!(Kramers, "spectrum is {}, not GSE", spectrum.meta.class.as_str());
    }
    if spectrum.meta.kramers_deduped {
        bail!(Kramers, "spectrum is already deduplicated");
    }
    let e = &spectrum.eigenvalues;
    if e.len() % 2 != 0 {
        bail!(Kramers, "odd number of levels ({})", e.len());
    }
    let radius = e.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let tol = rel_tol * radius;
    let mut out = Vec::with_capacity(e.len() / 2);
    for (k, p) in e.chunks(2).enumerate() {
        if (p[1] - p[0]).abs() > tol {
            bail!(Kramers, "levels {} and {} differ by {:e} > {:e}", 2 * k, 2 * k + 1, p[1] - p[0], tol);
        }
        out.push(p[0]);
    }
    let mut meta = spectrum.meta.clone();
    meta.kramers_deduped = true;
    Ok(Spectrum { meta, eigenvalues: out })
}
