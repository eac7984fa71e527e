//! The Lévy SYK Hamiltonian `H = Σ_I J_I Ψ_I` and its deformations.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::majorana::{majorana, majorana_string, sector_matrix, PauliString, Sector};
use crate::matrix::HermitianMatrix;
use crate::stable::{sample_couplings, validate_model, CouplingTensor};

/// Symmetry-breaking additions, each with strength `1/N` per term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Deformation {
    None,
    /// `(1/N)·χ_site` (zero-based site).
    Defect { site: usize },
    /// `(1/N)·Σ_{i<j} iχ_iχ_j`.
    Mass,
}

impl Deformation {
    pub fn label(&self) -> String {
        match self {
            Deformation::None => "none".into(),
            Deformation::Defect { site } => alloc::format!("defect{site}"),
            Deformation::Mass => "mass".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Deformation::None),
            "mass" => Ok(Deformation::Mass),
            "defect" => Ok(Deformation::Defect { site: 0 }),
            _ => match s.strip_prefix("defect") {
                Some(rest) => match rest.trim_start_matches([':', '=']).parse() {
                    Ok(site) => Ok(Deformation::Defect { site }),
                    Err(_) => bail!(Parameter, "bad defect site in '{s}'"),
                },
                None => bail!(Parameter, "unknown deformation '{s}'"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SykConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub mu: f64,
    pub seed: u64,
    pub deformation: Deformation,
    pub sector: Sector,
}

impl SykConfig {
    pub fn new(n: usize, mu: f64, seed: u64) -> Self {
        Self { n, q: 4, j: 1.0, mu, seed, deformation: Deformation::None, sector: Sector::Even }
    }

    /// Deformed models are always built in the full Hilbert space.
    pub fn with_deformation(mut self, d: Deformation) -> Self {
        self.deformation = d;
        if d != Deformation::None {
            self.sector = Sector::Full;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_model(self.n, self.q, self.j, self.mu)?;
        if self.deformation != Deformation::None && self.sector != Sector::Full {
            bail!(Parameter, "deformed Hamiltonians require sector=full");
        }
        if let Deformation::Defect { site } = self.deformation {
            if site >= self.n {
                bail!(Parameter, "defect site {site} out of range for N={}", self.n);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coupling: f64,
    pub string: PauliString,
    /// Majorana indices of the term, zero-based and increasing.
    pub indices: Vec<usize>,
}

/// SYK terms in coupling order followed by any deformation terms.
pub fn hamiltonian_terms(config: &SykConfig, couplings: &CouplingTensor) -> Result<Vec<Term>> {
    config.validate()?;
    if couplings.n_fermions != config.n || couplings.q != config.q {
        bail!(
            SizeMismatch,
            "couplings for N={}, q={} do not match config N={}, q={}",
            couplings.n_fermions,
            couplings.q,
            config.n,
            config.q
        );
    }
    let n = config.n;
    let mut terms = Vec::with_capacity(couplings.len());
    for (idx, &c) in couplings.tuples().zip(&couplings.values) {
        let string = majorana_string(&idx, n)?;
        terms.push(Term { coupling: c, string, indices: idx });
    }
    let w = 1.0 / n as f64;
    match config.deformation {
        Deformation::None => {}
        Deformation::Defect { site } => {
            terms.push(Term { coupling: w, string: majorana(site, n)?, indices: alloc::vec![site] });
        }
        Deformation::Mass => {
            for i in 0..n {
                for k in i + 1..n {
                    let idx = alloc::vec![i, k];
                    terms.push(Term { coupling: w, string: majorana_string(&idx, n)?, indices: idx });
                }
            }
        }
    }
    Ok(terms)
}

pub fn build_hamiltonian(terms: &[Term], sector: Sector, n_fermions: usize) -> Result<HermitianMatrix> {
    let pairs: Vec<(f64, PauliString)> = terms.iter().map(|t| (t.coupling, t.string)).collect();
    sector_matrix(&pairs, sector, n_fermions)
}

/// A sampled realization: couplings, terms and the Hamiltonian matrix.
#[derive(Debug, Clone)]
pub struct Realization {
    pub config: SykConfig,
    pub couplings: CouplingTensor,
    pub terms: Vec<Term>,
    pub hamiltonian: HermitianMatrix,
}

impl Realization {
    pub fn sample(config: &SykConfig) -> Result<Self> {
        config.validate()?;
        let couplings = sample_couplings(config.n, config.q, config.j, config.mu, config.seed)?;
        let terms = hamiltonian_terms(config, &couplings)?;
        let hamiltonian = build_hamiltonian(&terms, config.sector, config.n)?;
        Ok(Self { config: config.clone(), couplings, terms, hamiltonian })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: f64,
    pub radius: f64,
}

pub fn gershgorin_discs(h: &HermitianMatrix) -> Vec<Disc> {
    h.diagonal()
        .into_iter()
        .zip(h.offdiag_row_sums())
        .map(|(center, radius)| Disc { center, radius })
        .collect()
}

/// True when `x` lies in the union of the discs, up to `tol`.
pub fn in_disc_union(discs: &[Disc], x: f64, tol: f64) -> bool {
    discs.iter().any(|d| (x - d.center).abs() <= d.radius + tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitPolicy {
    /// The `k` largest magnitudes are outliers.
    TopK(usize),
    /// Every term with `|J| ≥ cutoff` is an outlier.
    Cutoff(f64),
}

/// Splits terms into outliers (sorted by decreasing `|J|`) and background.
pub fn split_terms(terms: &[Term], policy: SplitPolicy) -> Result<(Vec<Term>, Vec<Term>)> {
    if terms.is_empty() {
        bail!(InsufficientData, "no terms to split");
    }
    let nq = terms[0].string.n_qubits;
    if terms.iter().any(|t| t.string.n_qubits != nq) {
        bail!(SizeMismatch, "terms act on different numbers of qubits");
    }
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].coupling.abs().total_cmp(&terms[a].coupling.abs()).then(a.cmp(&b)));
    let n_out = match policy {
        SplitPolicy::TopK(k) => {
            if k > terms.len() {
                bail!(Parameter, "top_k={k} exceeds {} terms", terms.len());
            }
            k
        }
        SplitPolicy::Cutoff(c) => {
            if !(c >= 0.0) {
                bail!(Parameter, "cutoff={c} must be non-negative");
            }
            order.iter().take_while(|&&i| terms[i].coupling.abs() >= c).count()
        }
    };
    let outliers = order[..n_out].iter().map(|&i| terms[i].clone()).collect();
    let mut rest: Vec<usize> = order[n_out..].to_vec();
    rest.sort_unstable();
    let background = rest.into_iter().map(|i| terms[i].clone()).collect();
    Ok((outliers, background))
}
