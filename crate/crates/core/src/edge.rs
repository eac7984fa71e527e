//! Spectral-edge statistics: ground-state energy and the lowest gap.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::crossover::{linear_fit, LinearFit};
use crate::eigen::Spectrum;
use crate::error::{bail, Result};
use crate::majorana::SymmetryClass;
use crate::spectral::{histogram, Histogram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStateStats {
    /// `−exp⟨ln|E_min|⟩` over realizations with `E_min < 0`.
    pub log_avg: f64,
    /// Plain mean of every `E_min`.
    pub raw_avg: f64,
    pub used: usize,
    /// Realizations with `E_min ≥ 0`, left out of the log average.
    pub excluded: usize,
    /// Distribution of `(E_min − mean)/std` over the used realizations.
    pub histogram: Option<Histogram>,
}

pub fn ground_state_stats(e_min: &[f64], bins: usize) -> Result<GroundStateStats> {
    if e_min.is_empty() {
        bail!(InsufficientData, "no ground-state energies");
    }
    let used: Vec<f64> = e_min.iter().copied().filter(|e| *e < 0.0).collect();
    if used.is_empty() {
        bail!(Degenerate, "no realization has a negative ground-state energy");
    }
    let log_avg = -(used.iter().map(|e| e.abs().ln()).sum::<f64>() / used.len() as f64).exp();
    let raw_avg = e_min.iter().sum::<f64>() / e_min.len() as f64;
    let m = used.iter().sum::<f64>() / used.len() as f64;
    let sd = (used.iter().map(|e| (e - m).powi(2)).sum::<f64>() / used.len() as f64).sqrt();
    let histogram = if used.len() >= 2 && sd > 0.0 && bins > 0 {
        let z: Vec<f64> = used.iter().map(|e| (e - m) / sd).collect();
        let (lo, hi) = z.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        Some(histogram(&z, bins, lo, hi)?)
    } else {
        None
    };
    Ok(GroundStateStats { log_avg, raw_avg, used: used.len(), excluded: e_min.len() - used.len(), histogram })
}

/// Slope `ε` of the log-averaged ground energy against `N`.
pub fn epsilon_coefficient(points: &[(usize, f64)]) -> Result<LinearFit> {
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 3 {
        bail!(InsufficientData, "need at least 3 distinct N, got {}", ns.len());
    }
    let x: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    linear_fit(&x, &y)
}

/// Lowest two levels; GSE spectra must be Kramers-deduplicated first.
pub fn lowest_two(spectrum: &Spectrum) -> Result<(f64, f64)> {
    if spectrum.meta.class == SymmetryClass::Gse && !spectrum.meta.kramers_deduped {
        bail!(Parameter, "GSE spectrum must be Kramers-deduplicated first");
    }
    match spectrum.eigenvalues.as_slice() {
        [a, b, ..] => Ok((*a, *b)),
        _ => bail!(InsufficientData, "spectrum has fewer than two levels"),
    }
}

/// Minimum ensemble size for the gap ratio.
pub const MIN_GAP_REALIZATIONS: usize = 30;

/// `A = ⟨g²⟩/⟨g⟩²` of the lowest gap `g = E₂ − E₁`.
pub fn a_ratio(levels: &[(f64, f64)]) -> Result<f64> {
    if levels.len() < MIN_GAP_REALIZATIONS {
        bail!(InsufficientData, "need {} realizations, got {}", MIN_GAP_REALIZATIONS, levels.len());
    }
    if levels.iter().any(|(a, b)| b < a) {
        bail!(Parameter, "E2 must not lie below E1");
    }
    let n = levels.len() as f64;
    let m1 = levels.iter().map(|(a, b)| b - a).sum::<f64>() / n;
    let m2 = levels.iter().map(|(a, b)| (b - a).powi(2)).sum::<f64>() / n;
    if !(m1 > 0.0) {
        bail!(Degenerate, "mean gap is zero");
    }
    let a = m2 / (m1 * m1);
    debug_assert!(a >= 1.0 - 1e-12);
    Ok(a)
}
