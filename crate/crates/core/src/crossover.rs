//! Regressions behind the crossover scalings: `μ_c(N)`, Thouless-time decay
//! rates and the position of the form-factor peak.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for two points).
    pub slope_stderr: f64,
    pub points: usize,
}

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        bail!(SizeMismatch, "{} x values vs {} y values", n, y.len());
    }
    if n < 2 {
        bail!(InsufficientData, "need two points for a line, got {n}");
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        bail!(Parameter, "non-finite value in fit input");
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        bail!(Degenerate, "all x values coincide");
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (rss / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, slope_stderr, points: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    /// `ln y` against `ln x`; the slope is the power-law exponent.
    LogLog,
    /// `log10 y` against `x`; the slope is decades per unit of `x`.
    SemiLog,
}

/// Least squares in log space; needs at least three points.
pub fn power_law_fit(x: &[f64], y: &[f64], mode: FitMode) -> Result<LinearFit> {
    if x.len() < 3 {
        bail!(InsufficientData, "need three points for a power-law fit, got {}", x.len());
    }
    if y.iter().any(|v| !(*v > 0.0)) || (mode == FitMode::LogLog && x.iter().any(|v| !(*v > 0.0))) {
        bail!(Parameter, "logarithmic fit needs positive values");
    }
    match mode {
        FitMode::LogLog => {
            let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
            linear_fit(&lx, &ly)
        }
        FitMode::SemiLog => {
            let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
            linear_fit(x, &ly)
        }
    }
}

/// Crossover point of one `r(μ)` curve: the largest grid `μ` such that it and
/// every smaller grid `μ` deviate from `r_rmt` by more than `threshold`
/// (relative). `None` when even the smallest `μ` is within threshold.
pub fn fit_mu_c(curve: &[(f64, f64)], r_rmt: f64, threshold: f64) -> Option<f64> {
    let mut pts = curve.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut mu_c = None;
    for (mu, r) in pts {
        if ((r - r_rmt) / r_rmt).abs() > threshold {
            mu_c = Some(mu);
        } else {
            break;
        }
    }
    mu_c
}

/// `η₁` from `μ_c ∝ N^{−η₁}`; returns the fit with `slope = −η₁`.
pub fn fit_crossover_exponent(points: &[(usize, f64)]) -> Result<LinearFit> {
    let x: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    power_law_fit(&x, &y, FitMode::LogLog)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThoulessPoint {
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    pub tau_th: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub low: f64,
    pub high: f64,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        0.5 * (self.low + self.high)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThoulessScaling {
    /// `(μ, α_μ)` with `log10 τ_Th ≈ −α_μ N + c`.
    pub alpha: Vec<(f64, LinearFit)>,
    /// `(N, bracket)` of the second crossover `μ_{c,2}`.
    pub brackets: Vec<(usize, Bracket)>,
    /// `η₂` from the midpoint, low and high ends of the brackets.
    pub eta2_mid: Option<f64>,
    pub eta2_low: Option<f64>,
    pub eta2_high: Option<f64>,
}

impl ThoulessScaling {
    pub fn alpha_at(&self, mu: f64) -> Option<f64> {
        self.alpha.iter().find(|(m, _)| (m - mu).abs() < 1e-9).map(|(_, f)| -f.slope)
    }

    /// Spread of `η₂` across the three bracket choices.
    pub fn eta2_spread(&self) -> Option<f64> {
        let v = [self.eta2_mid?, self.eta2_low?, self.eta2_high?];
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        Some(hi - lo)
    }
}

fn mu_key(mu: f64) -> i64 {
    (mu * 1e9).round() as i64
}

/// Per-`μ` decay rates of `τ_Th(N)` and the `μ_{c,2}(N)` brackets.
///
/// For each `N`, scanning `μ` downwards, the bracket is the first grid `μ`
/// with `τ_Th ≥ closeness` and the grid value just above it.
pub fn fit_thouless_scaling(points: &[ThoulessPoint], closeness: f64) -> Result<ThoulessScaling> {
    let mut by_mu: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut by_n: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for p in points {
        if !(p.tau_th > 0.0) {
            bail!(Parameter, "non-positive Thouless time at N={}, mu={}", p.n, p.mu);
        }
        by_mu.entry(mu_key(p.mu)).or_default().push((p.n as f64, p.tau_th));
        by_n.entry(p.n).or_default().push((p.mu, p.tau_th));
    }
    let mut alpha = Vec::new();
    for (k, pts) in &by_mu {
        let distinct = {
            let mut ns: Vec<i64> = pts.iter().map(|p| p.0 as i64).collect();
            ns.sort_unstable();
            ns.dedup();
            ns.len()
        };
        if distinct < 3 {
            continue;
        }
        let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
        alpha.push((*k as f64 / 1e9, power_law_fit(&x, &y, FitMode::SemiLog)?));
    }
    let mut brackets = Vec::new();
    for (n, pts) in &mut by_n {
        pts.sort_by(|a, b| b.0.total_cmp(&a.0));
        for i in 1..pts.len() {
            if pts[i].1 >= closeness && pts[i - 1].1 < closeness {
                brackets.push((*n, Bracket { low: pts[i].0, high: pts[i - 1].0 }));
                break;
            }
        }
    }
    let eta = |pick: fn(&Bracket) -> f64| -> Option<f64> {
        if brackets.len() < 3 {
            return None;
        }
        let x: Vec<f64> = brackets.iter().map(|b| b.0 as f64).collect();
        let y: Vec<f64> = brackets.iter().map(|b| pick(&b.1)).collect();
        power_law_fit(&x, &y, FitMode::LogLog).ok().map(|f| -f.slope)
    };
    Ok(ThoulessScaling {
        eta2_mid: eta(|b| b.mid()),
        eta2_low: eta(|b| b.low),
        eta2_high: eta(|b| b.high),
        alpha,
        brackets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakScaling {
    /// `α*` with `log10 τ* ≈ −α* N + c`.
    pub alpha_star: f64,
    pub fit: LinearFit,
}

/// Decay rate of the peak position `τ*(N)`.
pub fn fit_peak_scaling(points: &[(usize, f64)]) -> Result<PeakScaling> {
    let x: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = power_law_fit(&x, &y, FitMode::SemiLog)?;
    Ok(PeakScaling { alpha_star: -fit.slope, fit })
}
