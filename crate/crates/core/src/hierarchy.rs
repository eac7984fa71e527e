//! Coupling hierarchy of Lévy tensors and perturbation theory around the
//! dominant term.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::crossover::{linear_fit, LinearFit};
use crate::eigen::eigh;
use crate::error::{bail, Result};
use crate::majorana::{sector_matrix, PauliString, Sector, SectorBasis};
use crate::matrix::HermitianMatrix;
use crate::stable::CouplingTensor;
use crate::syk::Term;

/// Level `z` of a coupling of magnitude `m`, from `|J|/J = N^{1/μ}·𝒩^{(z−1)/μ}`.
pub fn hierarchy_level(m: f64, t: &CouplingTensor) -> f64 {
    let n = t.n_fermions as f64;
    let count = t.values.len() as f64;
    1.0 + t.mu * ((m / t.j).ln() - n.ln() / t.mu) / count.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub z_lo: f64,
    pub z_hi: f64,
    /// `𝒩^{1−z}` at the bin centre.
    pub predicted: f64,
    pub observed: usize,
}

impl CensusRow {
    pub fn z(&self) -> f64 {
        0.5 * (self.z_lo + self.z_hi)
    }
}

/// Counts of couplings per level bin on `[0, 1]`. The first bin also takes
/// every `z < 0` and the last every `z > 1`.
pub fn hierarchy_census(t: &CouplingTensor, z_bins: usize) -> Result<Vec<CensusRow>> {
    if t.mu >= 2.0 {
        bail!(Parameter, "the hierarchy is only defined for mu < 2");
    }
    if z_bins < 3 {
        bail!(Parameter, "need at least 3 bins, got {z_bins}");
    }
    if t.values.len() < 2 {
        bail!(InsufficientData, "need at least two couplings");
    }
    let count = t.values.len() as f64;
    let w = 1.0 / z_bins as f64;
    let mut rows: Vec<CensusRow> = (0..z_bins)
        .map(|k| {
            let (lo, hi) = (k as f64 * w, (k + 1) as f64 * w);
            CensusRow { z_lo: lo, z_hi: hi, predicted: count.powf(1.0 - 0.5 * (lo + hi)), observed: 0 }
        })
        .collect();
    for v in &t.values {
        let m = v.abs();
        if m == 0.0 {
            rows[0].observed += 1;
            continue;
        }
        let z = hierarchy_level(m, t);
        let k = if z <= 0.0 { 0 } else { ((z / w) as usize).min(z_bins - 1) };
        rows[k].observed += 1;
    }
    Ok(rows)
}

/// Adds the counts of `other` into `acc` (same binning).
pub fn merge_census(acc: &mut [CensusRow], other: &[CensusRow]) -> Result<()> {
    if acc.len() != other.len() {
        bail!(SizeMismatch, "census tables have {} and {} bins", acc.len(), other.len());
    }
    for (a, b) in acc.iter_mut().zip(other) {
        a.observed += b.observed;
    }
    Ok(())
}

/// Slope of `ln(count)` against `z` over the interior bins with non-zero
/// counts; the prediction is `−ln 𝒩`.
pub fn census_slope(rows: &[CensusRow]) -> Result<LinearFit> {
    if rows.len() < 3 {
        bail!(InsufficientData, "need at least 3 bins");
    }
    let inner = &rows[1..rows.len() - 1];
    let (x, y): (Vec<f64>, Vec<f64>) =
        inner.iter().filter(|r| r.observed > 0).map(|r| (r.z(), (r.observed as f64).ln())).unzip();
    linear_fit(&x, &y)
}

/// `max|J| / Σ_{others}|J|`; infinite for a single coupling.
pub fn outlier_ratio(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        bail!(InsufficientData, "no couplings");
    }
    let (imax, max) = values
        .iter()
        .map(|v| v.abs())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    let rest: f64 = values.iter().enumerate().filter(|(i, _)| *i != imax).map(|(_, v)| v.abs()).sum();
    Ok(if rest == 0.0 { f64::INFINITY } else { max / rest })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperEdge {
    pub fermions: Vec<usize>,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    Hyperedges,
    /// Every hyperedge adds `|J|` to each pair it contains.
    Pairs,
}

/// Interactions with `|J| > cutoff·max|J|`.
pub fn interaction_graph(t: &CouplingTensor, cutoff: f64, mode: GraphMode) -> Result<Vec<HyperEdge>> {
    if !(cutoff >= 0.0) {
        bail!(Parameter, "cutoff={cutoff} must be non-negative");
    }
    let max = t.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let thr = cutoff * max;
    let kept: Vec<HyperEdge> = t
        .tuples()
        .zip(&t.values)
        .filter(|(_, v)| v.abs() > thr)
        .map(|(f, v)| HyperEdge { fermions: f, weight: *v })
        .collect();
    Ok(match mode {
        GraphMode::Hyperedges => kept,
        GraphMode::Pairs => {
            let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for e in &kept {
                for a in 0..e.fermions.len() {
                    for b in a + 1..e.fermions.len() {
                        *acc.entry((e.fermions[a], e.fermions[b])).or_default() += e.weight.abs();
                    }
                }
            }
            acc.into_iter().map(|((a, b), w)| HyperEdge { fermions: vec![a, b], weight: w }).collect()
        }
    })
}

/// Indices of `others` that commute and anticommute with `dominant`.
pub fn classify_terms(dominant: &PauliString, others: &[PauliString]) -> Result<(Vec<usize>, Vec<usize>)> {
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, o) in others.iter().enumerate() {
        if dominant.commutes(o)? {
            a.push(i);
        } else {
            b.push(i);
        }
    }
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PtMethod {
    /// Rayleigh–Schrödinger around the diagonal of the rotated Hamiltonian,
    /// every pair treated as non-degenerate.
    Nondegenerate,
    /// The two eigenspaces of the dominant string are exactly degenerate at
    /// zeroth order: diagonalize the projected Hamiltonian in each and add the
    /// second-order coupling to the other eigenspace.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtOptions {
    pub method: PtMethod,
    /// Pairs with an energy denominator below `degeneracy_cut·|J₁|` are skipped.
    pub degeneracy_cut: f64,
    /// `|J₁|` must exceed this multiple of the next largest coupling.
    pub dominance_factor: f64,
}

impl Default for PtOptions {
    fn default() -> Self {
        Self { method: PtMethod::Degenerate, degeneracy_cut: 1e-8, dominance_factor: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeSpectrum {
    /// Sorted eigenvalue estimates.
    pub estimates: Vec<f64>,
    pub skipped_pairs: usize,
    /// Signed coupling of the dominant term.
    pub dominant: f64,
    /// `|J₁| / Σ_{others}|J|`.
    pub dominance_ratio: f64,
    /// Diagonal and row radii of the rotated Hamiltonian.
    pub rotated_centers: Vec<f64>,
    pub rotated_radii: Vec<f64>,
}

/// Eigenvectors of a Hermitian Pauli string on a sector basis, each as at
/// most two `(basis index, amplitude)` entries, with their `±1` eigenvalues.
fn pauli_eigenbasis(p: &PauliString, basis: &SectorBasis) -> (Vec<[(usize, c64); 2]>, Vec<f64>) {
    let d = basis.dim();
    let mut vecs = Vec::with_capacity(d);
    let mut signs = Vec::with_capacity(d);
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let zero = c64::new(0.0, 0.0);
    if p.x == 0 {
        for (i, &b) in basis.states.iter().enumerate() {
            let (_, c) = p.apply(b);
            vecs.push([(i, c64::new(1.0, 0.0)), (i, zero)]);
            signs.push(c.re);
        }
        return (vecs, signs);
    }
    let pivot = p.x & p.x.wrapping_neg();
    for (i, &b) in basis.states.iter().enumerate() {
        if b & pivot != 0 {
            continue;
        }
        let (bp, c) = p.apply(b);
        let j = basis.index_of(bp).expect("string preserves the sector");
        vecs.push([(i, c64::new(h, 0.0)), (j, c * h)]);
        signs.push(1.0);
        vecs.push([(i, c64::new(h, 0.0)), (j, -c * h)]);
        signs.push(-1.0);
    }
    (vecs, signs)
}

/// Perturbative spectrum of `Σ terms` in `sector` around its largest term.
pub fn perturbative_spectrum(
    terms: &[Term],
    sector: Sector,
    n_fermions: usize,
    opts: &PtOptions,
) -> Result<PerturbativeSpectrum> {
    if terms.len() < 2 {
        bail!(InsufficientData, "need a dominant term and a background");
    }
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[b].coupling.abs().total_cmp(&terms[a].coupling.abs()));
    let j1 = terms[order[0]].coupling;
    let j2 = terms[order[1]].coupling.abs();
    if !(j1.abs() > opts.dominance_factor * j2) {
        bail!(
            NoDominantTerm,
            "|J1|={:.3e} is not {}x the next coupling {:.3e}; use exact diagonalization",
            j1.abs(),
            opts.dominance_factor,
            j2
        );
    }
    let rest: f64 = order[1..].iter().map(|&i| terms[i].coupling.abs()).sum();
    let dominant = terms[order[0]].string;
    if sector != Sector::Full && !dominant.preserves_parity() {
        bail!(ParityViolation, "dominant term does not preserve the sector");
    }

    let pairs: Vec<(f64, PauliString)> = terms.iter().map(|t| (t.coupling, t.string)).collect();
    let h = sector_matrix(&pairs, sector, n_fermions)?.to_complex();
    let basis = SectorBasis::new(dominant.n_qubits, sector)?;
    let (vecs, signs) = pauli_eigenbasis(&dominant, &basis);
    let d = vecs.len();

    // H' = U† H U with two-sparse columns of U.
    let mut hp = Mat::<c64>::zeros(d, d);
    for l in 0..d {
        for k in 0..d {
            let mut acc = c64::new(0.0, 0.0);
            for &(ik, ak) in &vecs[k] {
                if ak.norm_sqr() == 0.0 {
                    continue;
                }
                for &(il, al) in &vecs[l] {
                    if al.norm_sqr() == 0.0 {
                        continue;
                    }
                    acc += ak.conj() * h[(ik, il)] * al;
                }
            }
            hp[(k, l)] = acc;
        }
    }
    let centers: Vec<f64> = (0..d).map(|k| hp[(k, k)].re).collect();
    let radii: Vec<f64> =
        (0..d).map(|k| (0..d).filter(|&l| l != k).map(|l| hp[(k, l)].norm()).sum()).collect();
    let cut = opts.degeneracy_cut * j1.abs();
    let mut skipped = 0usize;
    let mut est = Vec::with_capacity(d);

    match opts.method {
        PtMethod::Nondegenerate => {
            for k in 0..d {
                let mut e = centers[k];
                for l in 0..d {
                    if l == k {
                        continue;
                    }
                    let den = centers[k] - centers[l];
                    if den.abs() < cut {
                        skipped += 1;
                        continue;
                    }
                    e += hp[(k, l)].norm_sqr() / den;
                }
                est.push(e);
            }
        }
        PtMethod::Degenerate => {
            for s in [1.0, -1.0] {
                let inside: Vec<usize> = (0..d).filter(|&k| signs[k] == s).collect();
                let outside: Vec<usize> = (0..d).filter(|&k| signs[k] != s).collect();
                if inside.is_empty() {
                    continue;
                }
                let block = Mat::from_fn(inside.len(), inside.len(), |a, b| hp[(inside[a], inside[b])]);
                let (w, v) = eigh(&HermitianMatrix::Complex(block))?;
                for (c, &wc) in w.iter().enumerate() {
                    let mut e = wc;
                    for &m in &outside {
                        let mut amp = c64::new(0.0, 0.0);
                        for (a, &k) in inside.iter().enumerate() {
                            amp += hp[(m, k)] * v[(a, c)];
                        }
                        let den = wc - centers[m];
                        if den.abs() < cut {
                            skipped += 1;
                            continue;
                        }
                        e += amp.norm_sqr() / den;
                    }
                    est.push(e);
                }
            }
        }
    }
    est.sort_by(f64::total_cmp);
    Ok(PerturbativeSpectrum {
        estimates: est,
        skipped_pairs: skipped,
        dominant: j1,
        dominance_ratio: if rest == 0.0 { f64::INFINITY } else { j1.abs() / rest },
        rotated_centers: centers,
        rotated_radii: radii,
    })
}

/// `sqrt(mean((a−b)²)) / sqrt(mean(b²))` for equally long sorted spectra.
pub fn relative_rms_error(estimate: &[f64], exact: &[f64]) -> Result<f64> {
    if estimate.len() != exact.len() || exact.is_empty() {
        bail!(SizeMismatch, "{} estimates vs {} exact levels", estimate.len(), exact.len());
    }
    let num: f64 = estimate.iter().zip(exact).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = exact.iter().map(|b| b * b).sum();
    if !(den > 0.0) {
        bail!(Degenerate, "exact spectrum is identically zero");
    }
    Ok((num / den).sqrt())
}

/// Exact 1D two-means clustering; returns the sorted pair of cluster centres.
pub fn two_means(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        bail!(InsufficientData, "need two values");
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mut prefix = vec![0.0; n + 1];
    let mut prefix2 = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + v[i];
        prefix2[i + 1] = prefix2[i] + v[i] * v[i];
    }
    let sse = |a: usize, b: usize| {
        let m = (b - a) as f64;
        let s = prefix[b] - prefix[a];
        prefix2[b] - prefix2[a] - s * s / m
    };
    let split = (1..n).min_by(|&a, &b| (sse(0, a) + sse(a, n)).total_cmp(&(sse(0, b) + sse(b, n)))).unwrap_or(1);
    Ok((prefix[split] / split as f64, (prefix[n] - prefix[split]) / (n - split) as f64))
}
