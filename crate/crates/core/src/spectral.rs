//! Level statistics: gap ratios, unfolding, spectral form factor, histograms.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::c64;
use crate::eigen::Spectrum;
use crate::error::{bail, Result};
use crate::majorana::SymmetryClass;

pub const R_GOE: f64 = 0.5307;
pub const R_GUE: f64 = 0.5996;
pub const R_GSE: f64 = 0.6744;
/// `2 ln 2 − 1`.
pub const R_POISSON: f64 = 0.386_294_361_119_890_6;

pub fn rmt_r_value(class: SymmetryClass) -> f64 {
    match class {
        SymmetryClass::Goe => R_GOE,
        SymmetryClass::Gue => R_GUE,
        SymmetryClass::Gse => R_GSE,
    }
}

/// Half-open index range of the centred fraction `window` of `n` levels.
pub fn window_range(n: usize, window: f64) -> (usize, usize) {
    let lo = ((n as f64) * (1.0 - window) / 2.0).floor() as usize;
    (lo.min(n), n - lo.min(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RStat {
    pub mean: f64,
    /// Ratios that entered the mean.
    pub count: usize,
    /// Ratios dropped because a spacing was exactly zero.
    pub excluded: usize,
}

/// Gap ratios `min(s_n, s_{n−1}) / max(s_n, s_{n−1})` over the centred
/// fraction `window` of sorted levels.
pub fn gap_ratios(levels: &[f64], window: f64) -> Result<(Vec<f64>, usize)> {
    if !(window > 0.0 && window <= 1.0) {
        bail!(Parameter, "window={window} outside (0, 1]");
    }
    let (lo, hi) = window_range(levels.len(), window);
    if hi < lo + 3 {
        bail!(InsufficientData, "window holds {} levels, need 3", hi.saturating_sub(lo));
    }
    let w = &levels[lo..hi];
    let mut out = Vec::with_capacity(w.len() - 2);
    let mut excluded = 0;
    for t in w.windows(3) {
        let (a, b) = (t[1] - t[0], t[2] - t[1]);
        if a == 0.0 || b == 0.0 {
            excluded += 1;
            continue;
        }
        out.push(a.min(b) / a.max(b));
    }
    Ok((out, excluded))
}

pub fn r_statistics_levels(levels: &[f64], window: f64) -> Result<RStat> {
    let (r, excluded) = gap_ratios(levels, window)?;
    if r.is_empty() {
        bail!(Degenerate, "every spacing in the window is zero");
    }
    Ok(RStat { mean: r.iter().sum::<f64>() / r.len() as f64, count: r.len(), excluded })
}

/// Mean gap ratio of one spectrum; GSE spectra must be Kramers-deduplicated.
pub fn r_statistics(spectrum: &Spectrum, window: f64) -> Result<RStat> {
    if spectrum.meta.class == SymmetryClass::Gse && !spectrum.meta.kramers_deduped {
        bail!(Parameter, "GSE spectrum must be Kramers-deduplicated first");
    }
    r_statistics_levels(&spectrum.eigenvalues, window)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMean {
    pub mean: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub count: usize,
}

pub fn ensemble_mean(values: &[f64]) -> Result<EnsembleMean> {
    let n = values.len();
    if n == 0 {
        bail!(InsufficientData, "empty ensemble");
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Ok(EnsembleMean { mean, stderr, count: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnfoldOptions {
    pub degree: usize,
    /// Centred fraction of levels used for the fit and returned.
    pub window: f64,
}

impl Default for UnfoldOptions {
    fn default() -> Self {
        Self { degree: 6, window: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unfolded {
    /// Raw levels inside the fit window.
    pub raw: Vec<f64>,
    /// Fitted staircase at those levels; unit mean spacing.
    pub unfolded: Vec<f64>,
    /// Mean of the whole raw spectrum.
    pub mean_energy: f64,
    /// Standard deviation of the whole raw spectrum.
    pub std_energy: f64,
}

/// Least-squares polynomial coefficients (lowest order first) of `y(x)`.
/// Fails when the design matrix is numerically rank deficient.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = x.len();
    if m != y.len() {
        bail!(SizeMismatch, "{} abscissae vs {} ordinates", m, y.len());
    }
    if m <= degree {
        bail!(InsufficientData, "{m} points cannot fix a degree-{degree} polynomial");
    }
    let a = Mat::from_fn(m, degree + 1, |i, k| x[i].powi(k as i32));
    let b = Mat::from_fn(m, 1, |i, _| y[i]);
    let qr = a.qr();
    let r = qr.thin_R();
    let d0 = r[(0, 0)].abs();
    let dmin = (0..=degree).map(|k| r[(k, k)].abs()).fold(f64::INFINITY, f64::min);
    if !(dmin > 1e-12 * d0) {
        bail!(IllConditioned, "polynomial fit of degree {degree} is rank deficient; lower the degree");
    }
    let sol = qr.solve_lstsq(&b);
    Ok((0..=degree).map(|k| sol[(k, 0)]).collect())
}

pub fn polyval(coef: &[f64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Unfolds sorted levels by a polynomial fit to the staircase `n(E)` on the
/// centred window. Energies are mapped to `[−1, 1]` before fitting.
pub fn unfold(levels: &[f64], opts: &UnfoldOptions) -> Result<Unfolded> {
    let n = levels.len();
    if !(opts.window > 0.0 && opts.window <= 1.0) {
        bail!(Parameter, "unfolding window={} outside (0, 1]", opts.window);
    }
    let (lo, hi) = window_range(n, opts.window);
    if hi <= lo + opts.degree + 1 {
        bail!(InsufficientData, "{} levels in window for degree {}", hi - lo, opts.degree);
    }
    let raw = levels[lo..hi].to_vec();
    let (emin, emax) = (raw[0], raw[raw.len() - 1]);
    if !(emax > emin) {
        bail!(Degenerate, "levels in the unfolding window are all equal");
    }
    let c = 0.5 * (emin + emax);
    let h = 0.5 * (emax - emin);
    let x: Vec<f64> = raw.iter().map(|e| (e - c) / h).collect();
    let stair: Vec<f64> = (lo..hi).map(|i| i as f64 + 0.5).collect();
    let coef = polyfit(&x, &stair, opts.degree)?;
    let unfolded: Vec<f64> = x.iter().map(|&t| polyval(&coef, t)).collect();
    if unfolded.windows(2).any(|w| w[1] < w[0]) {
        bail!(IllConditioned, "degree-{} unfolding is not monotone; lower the degree", opts.degree);
    }
    let mean_energy = levels.iter().sum::<f64>() / n as f64;
    let std_energy = (levels.iter().map(|e| (e - mean_energy).powi(2)).sum::<f64>() / n as f64).sqrt();
    Ok(Unfolded { raw, unfolded, mean_energy, std_energy })
}

/// `points` log-spaced values on `[min, max]`.
pub fn log_tau_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min) || points < 2 {
        bail!(Parameter, "bad tau grid [{min}, {max}] with {points} points");
    }
    let (a, b) = (min.ln(), max.ln());
    Ok((0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGridSpec {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for TauGridSpec {
    fn default() -> Self {
        Self { min: 1e-4, max: 10.0, points: 2000 }
    }
}

impl TauGridSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        log_tau_grid(self.min, self.max, self.points)
    }
}

/// Per-realization contributions to the form factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SffTerms {
    /// `|Σ F e^{−i2πε̃τ}|²` per `τ`.
    pub abs2: Vec<f64>,
    /// `Σ F e^{−i2πε̃τ}` per `τ`.
    pub z: Vec<c64>,
    /// `Σ F²`.
    pub norm: f64,
}

/// Gaussian filter weights `exp(−(E−Ē)²/(2(ηΓ)²))`, or ones without a filter.
pub fn filter_weights(u: &Unfolded, eta: Option<f64>) -> Vec<f64> {
    match eta {
        None => vec![1.0; u.raw.len()],
        Some(eta) => {
            let w = eta * u.std_energy;
            u.raw.iter().map(|e| (-(e - u.mean_energy).powi(2) / (2.0 * w * w)).exp()).collect()
        }
    }
}

pub fn sff_terms(u: &Unfolded, eta: Option<f64>, tau: &[f64]) -> SffTerms {
    let f = filter_weights(u, eta);
    let norm = f.iter().map(|x| x * x).sum();
    let mut abs2 = Vec::with_capacity(tau.len());
    let mut z = Vec::with_capacity(tau.len());
    for &t in tau {
        let (mut re, mut im) = (0.0, 0.0);
        let k = 2.0 * PI * t;
        for (e, w) in u.unfolded.iter().zip(&f) {
            let (s, c) = (k * e).sin_cos();
            re += w * c;
            im -= w * s;
        }
        abs2.push(re * re + im * im);
        z.push(c64::new(re, im));
    }
    SffTerms { abs2, z, norm }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SffCurve {
    pub tau: Vec<f64>,
    /// Full form factor `K`.
    pub k: Vec<f64>,
    /// Disconnected part `K_dc`.
    pub k_dc: Vec<f64>,
    /// Connected part `K_c = K − K_dc`.
    pub k_c: Vec<f64>,
    pub realizations: usize,
}

/// Combines per-realization terms, in the given order, into `K`, `K_dc`, `K_c`,
/// each normalized by `⟨Σ F²⟩`.
pub fn combine_sff(tau: &[f64], terms: &[SffTerms]) -> Result<SffCurve> {
    let r = terms.len();
    if r < 2 {
        bail!(InsufficientData, "form factor needs at least 2 realizations, got {r}");
    }
    let nt = tau.len();
    if terms.iter().any(|t| t.abs2.len() != nt || t.z.len() != nt) {
        bail!(SizeMismatch, "realization terms do not match the tau grid");
    }
    let rf = r as f64;
    let norm = terms.iter().map(|t| t.norm).sum::<f64>() / rf;
    if !(norm > 0.0) {
        bail!(Degenerate, "filter removes every level");
    }
    let mut k = vec![0.0; nt];
    let mut z = vec![c64::new(0.0, 0.0); nt];
    for t in terms {
        for i in 0..nt {
            k[i] += t.abs2[i];
            z[i] += t.z[i];
        }
    }
    let k: Vec<f64> = k.into_iter().map(|v| v / rf / norm).collect();
    let k_dc: Vec<f64> = z.into_iter().map(|v| (v / rf).norm_sqr() / norm).collect();
    let k_c = k.iter().zip(&k_dc).map(|(a, b)| a - b).collect();
    Ok(SffCurve { tau: tau.to_vec(), k, k_dc, k_c, realizations: r })
}

/// Filtered form factor of an unfolded ensemble. `eta = None` disables the filter.
pub fn sff(ensemble: &[Unfolded], eta: Option<f64>, tau: &[f64]) -> Result<SffCurve> {
    if let Some(e) = eta {
        if !(0.1..=0.5).contains(&e) {
            bail!(Parameter, "filter width eta={e} outside [0.1, 0.5]");
        }
    }
    let terms: Vec<SffTerms> = ensemble.iter().map(|u| sff_terms(u, eta, tau)).collect();
    combine_sff(tau, &terms)
}

/// Connected form factor of the Gaussian ensembles in unfolded units.
pub fn rmt_sff_reference(class: SymmetryClass, tau: f64) -> f64 {
    match class {
        SymmetryClass::Gue => tau.min(1.0),
        SymmetryClass::Goe => {
            if tau <= 1.0 {
                2.0 * tau - tau * (1.0 + 2.0 * tau).ln()
            } else {
                2.0 - tau * ((2.0 * tau + 1.0) / (2.0 * tau - 1.0)).ln()
            }
        }
        SymmetryClass::Gse => {
            if tau == 1.0 {
                f64::INFINITY
            } else if tau <= 2.0 {
                tau / 2.0 - tau / 4.0 * (1.0 - tau).abs().ln()
            } else {
                1.0
            }
        }
    }
}

/// Centred moving average of width `window`, shrinking at the edges.
pub fn moving_average(values: &[f64], window: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if window == 0 || window > n {
        bail!(Parameter, "window {window} must be in [1, {n}]");
    }
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().copied().unwrap_or(0.0) + v);
    }
    let before = (window - 1) / 2;
    let after = window - 1 - before;
    Ok((0..n)
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after).min(n - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect())
}

pub fn smooth_sff(curve: &SffCurve, window: usize) -> Result<SffCurve> {
    Ok(SffCurve {
        tau: curve.tau.clone(),
        k: moving_average(&curve.k, window)?,
        k_dc: moving_average(&curve.k_dc, window)?,
        k_c: moving_average(&curve.k_c, window)?,
        realizations: curve.realizations,
    })
}

/// `|log10(K_c / K_RMT)|`, infinite where `K_c ≤ 0`.
pub fn log_deviation(curve: &SffCurve, class: SymmetryClass) -> Vec<f64> {
    curve
        .tau
        .iter()
        .zip(&curve.k_c)
        .map(|(&t, &k)| if k > 0.0 { (k / rmt_sff_reference(class, t)).log10().abs() } else { f64::INFINITY })
        .collect()
}

/// Smallest grid `τ < 1` such that the connected curve stays within
/// `threshold` decades of the reference on every grid point of
/// `[τ, min(2τ, 1)]`; 1 when no such `τ` exists.
pub fn thouless_time(curve: &SffCurve, class: SymmetryClass, threshold: f64) -> f64 {
    let dk = log_deviation(curve, class);
    let tau = &curve.tau;
    for i in 0..tau.len() {
        if tau[i] >= 1.0 {
            break;
        }
        let upper = (2.0 * tau[i]).min(1.0);
        let ok = (i..tau.len()).take_while(|&j| tau[j] <= upper).all(|j| dk[j] <= threshold);
        if ok {
            return tau[i];
        }
    }
    1.0
}

/// Index of the minimum of `K` over `τ ≤ 1`.
pub fn sff_dip(curve: &SffCurve) -> usize {
    let end = curve.tau.iter().take_while(|&&t| t <= 1.0).count();
    (0..end).min_by(|&a, &b| curve.k[a].total_cmp(&curve.k[b])).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SffPeak {
    pub found: bool,
    pub tau: f64,
    pub k_c: f64,
    pub k_rmt: f64,
}

/// Highest local maximum of the connected curve above the reference, after
/// the dip and before `tau_th`. The dip is the minimum of the full form
/// factor `K` for `τ ≤ 1`.
pub fn sff_peak(curve: &SffCurve, class: SymmetryClass, tau_th: f64) -> SffPeak {
    let none = SffPeak { found: false, tau: f64::NAN, k_c: f64::NAN, k_rmt: f64::NAN };
    let end = curve.tau.iter().take_while(|&&t| t <= tau_th.min(1.0)).count();
    if end < 3 {
        return none;
    }
    let kc = &curve.k_c[..end];
    let dip = sff_dip(curve);
    let mut best: Option<usize> = None;
    for i in dip + 1..end - 1 {
        let t = curve.tau[i];
        if kc[i] > kc[i - 1] && kc[i] >= kc[i + 1] && kc[i] > rmt_sff_reference(class, t) {
            if best.map_or(true, |b| kc[i] > kc[b]) {
                best = Some(i);
            }
        }
    }
    match best {
        Some(i) => SffPeak {
            found: true,
            tau: curve.tau[i],
            k_c: kc[i],
            k_rmt: rmt_sff_reference(class, curve.tau[i]),
        },
        None => none,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
}

impl Histogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    /// `Σ density·width`, 1 for a normalized histogram.
    pub fn integral(&self) -> f64 {
        self.edges.windows(2).zip(&self.density).map(|(w, d)| (w[1] - w[0]) * d).sum()
    }
}

/// Normalized histogram of `values` on `[lo, hi]` (values outside are dropped).
pub fn histogram(values: &[f64], bins: usize, lo: f64, hi: f64) -> Result<Histogram> {
    if bins == 0 || !(hi > lo) {
        bail!(Parameter, "need bins > 0 and hi > lo");
    }
    let w = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for &v in values {
        if v < lo || v > hi {
            continue;
        }
        counts[(((v - lo) / w) as usize).min(bins - 1)] += 1;
        total += 1;
    }
    if total == 0 {
        bail!(InsufficientData, "no values inside [{lo}, {hi}]");
    }
    let edges = (0..=bins).map(|k| lo + w * k as f64).collect();
    let density = counts.iter().map(|&c| c as f64 / (total as f64 * w)).collect();
    Ok(Histogram { edges, density })
}

/// Pooled density of states, each spectrum rescaled to `[−0.5, 0.5]` when
/// `rescale` is set.
pub fn dos_histogram(spectra: &[Vec<f64>], bins: usize, rescale: bool) -> Result<Histogram> {
    let mut pooled = Vec::new();
    for s in spectra {
        if s.is_empty() {
            continue;
        }
        let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if rescale && hi > lo {
            pooled.extend(s.iter().map(|x| (x - lo) / (hi - lo) - 0.5));
        } else {
            pooled.extend_from_slice(s);
        }
    }
    let (lo, hi) = if rescale {
        (-0.5, 0.5)
    } else {
        pooled.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
    };
    histogram(&pooled, bins, lo, hi)
}

/// Nearest-neighbour spacings of unfolded levels, rescaled to unit mean.
pub fn normalized_spacings(ensemble: &[Unfolded]) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = ensemble.iter().flat_map(|u| u.unfolded.windows(2).map(|w| w[1] - w[0])).collect();
    if s.is_empty() {
        bail!(InsufficientData, "no spacings");
    }
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    if !(mean > 0.0) {
        bail!(Degenerate, "zero mean spacing");
    }
    s.iter_mut().for_each(|x| *x /= mean);
    Ok(s)
}

/// Normalized spacing histogram on `[0, max s]`.
pub fn spacing_distribution(ensemble: &[Unfolded], bins: usize) -> Result<Histogram> {
    let s = normalized_spacings(ensemble)?;
    let hi = s.iter().copied().fold(0.0, f64::max);
    histogram(&s, bins, 0.0, hi)
}

/// Wigner surmise for a Gaussian ensemble, or `e^{−s}` for `None` (Poisson).
pub fn wigner_surmise(class: Option<SymmetryClass>, s: f64) -> f64 {
    match class {
        None => (-s).exp(),
        Some(SymmetryClass::Goe) => PI / 2.0 * s * (-PI * s * s / 4.0).exp(),
        Some(SymmetryClass::Gue) => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
        Some(SymmetryClass::Gse) => {
            let c = 262_144.0 / (729.0 * PI * PI * PI);
            c * s.powi(4) * (-64.0 * s * s / (9.0 * PI)).exp()
        }
    }
}
