//! Crossover fits over the derived tables of a sweep.

use std::collections::BTreeMap;

use anyhow::Result;
use levy_syk::crossover::{
    fit_crossover_exponent, fit_mu_c, fit_peak_scaling, fit_thouless_scaling, LinearFit, ThoulessPoint,
    ThoulessScaling,
};
use levy_syk::edge::epsilon_coefficient;
use serde::{Deserialize, Serialize};

use crate::config::{MAIN_THRESHOLD, SUPPLEMENT_THRESHOLD};
use crate::sweep::{EdgeRow, RRow, ThoulessRow};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuCRow {
    pub label: String,
    pub threshold: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub mu_c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuCFit {
    pub label: String,
    pub threshold: f64,
    /// `(N, μ_c)` for every size with a deviating region.
    pub mu_c: Vec<(usize, f64)>,
    /// Sizes without any deviation above the threshold.
    pub excluded: Vec<usize>,
    /// `η₁ = −slope` of `ln μ_c` against `ln N`.
    pub eta1: Option<f64>,
    pub eta1_stderr: Option<f64>,
}

impl MuCFit {
    /// True when `μ_c` never grows with `N` by more than `slack`.
    pub fn non_increasing(&self, slack: f64) -> bool {
        self.mu_c.windows(2).all(|w| w[1].1 <= w[0].1 + slack + 1e-12)
    }
}

/// `μ_c(N)` per size and the power-law exponent at one threshold.
pub fn mu_c_fit(rows: &[RRow], label: &str, threshold: f64) -> MuCFit {
    let mut by_n: BTreeMap<usize, (f64, Vec<(f64, f64)>)> = BTreeMap::new();
    for r in rows {
        let e = by_n.entry(r.n).or_insert((r.r_rmt, Vec::new()));
        e.1.push((r.mu, r.r_mean));
    }
    let (mut mu_c, mut excluded) = (Vec::new(), Vec::new());
    for (n, (r_rmt, curve)) in &by_n {
        match fit_mu_c(curve, *r_rmt, threshold) {
            Some(m) => mu_c.push((*n, m)),
            None => excluded.push(*n),
        }
    }
    let fit = fit_crossover_exponent(&mu_c).ok();
    MuCFit {
        label: label.into(),
        threshold,
        eta1: fit.map(|f| -f.slope),
        eta1_stderr: fit.map(|f| f.slope_stderr),
        mu_c,
        excluded,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeakFit {
    pub mu: f64,
    pub points: Vec<(usize, f64)>,
    pub alpha_star: f64,
    pub alpha_star_stderr: f64,
    /// `α_μ` at the same `μ`, for the `α* > α_μ` consistency check.
    pub alpha_mu: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fits {
    pub mu_c: Vec<MuCFit>,
    pub thouless: Option<ThoulessScaling>,
    pub peaks: Vec<PeakFit>,
    /// `(μ, ε)` with `ε` the slope of the log-averaged ground energy in `N`.
    pub epsilon: Vec<(f64, LinearFit)>,
}

impl Fits {
    pub fn mu_c_rows(&self) -> Vec<MuCRow> {
        let mut out = Vec::new();
        for f in &self.mu_c {
            let mut all: Vec<(usize, Option<f64>)> = f.mu_c.iter().map(|&(n, m)| (n, Some(m))).collect();
            all.extend(f.excluded.iter().map(|&n| (n, None)));
            all.sort_by_key(|p| p.0);
            out.extend(all.into_iter().map(|(n, m)| MuCRow { label: f.label.clone(), threshold: f.threshold, n, mu_c: m }));
        }
        out
    }
}

/// Every fit the tables support. The configured `r_threshold` is reported
/// next to the two presets.
pub fn fit_all(r: &[RRow], edge: &[EdgeRow], th: &[ThoulessRow], r_threshold: f64, closeness: f64) -> Result<Fits> {
    let mut mu_c = vec![mu_c_fit(r, "main", MAIN_THRESHOLD), mu_c_fit(r, "supplement", SUPPLEMENT_THRESHOLD)];
    if r_threshold != MAIN_THRESHOLD && r_threshold != SUPPLEMENT_THRESHOLD {
        mu_c.push(mu_c_fit(r, "config", r_threshold));
    }

    let thouless = if th.is_empty() {
        None
    } else {
        let pts: Vec<ThoulessPoint> = th.iter().map(|t| ThoulessPoint { n: t.n, mu: t.mu, tau_th: t.tau_th }).collect();
        Some(fit_thouless_scaling(&pts, closeness)?)
    };

    let mut by_mu: BTreeMap<i64, Vec<(usize, f64)>> = BTreeMap::new();
    for t in th.iter().filter(|t| t.mu < 2.0) {
        if let Some(tp) = t.tau_peak {
            by_mu.entry((t.mu * 1e9).round() as i64).or_default().push((t.n, tp));
        }
    }
    let mut peaks = Vec::new();
    for (k, pts) in by_mu {
        let mu = k as f64 / 1e9;
        if let Ok(p) = fit_peak_scaling(&pts) {
            let alpha_mu = thouless.as_ref().and_then(|s| s.alpha_at(mu));
            peaks.push(PeakFit { mu, points: pts, alpha_star: p.alpha_star, alpha_star_stderr: p.fit.slope_stderr, alpha_mu });
        }
    }

    let mut by_mu_e: BTreeMap<i64, Vec<(usize, f64)>> = BTreeMap::new();
    for e in edge {
        by_mu_e.entry((e.mu * 1e9).round() as i64).or_default().push((e.n, e.e_min_log_avg));
    }
    let epsilon = by_mu_e
        .into_iter()
        .filter_map(|(k, pts)| epsilon_coefficient(&pts).ok().map(|f| (k as f64 / 1e9, f)))
        .collect();

    Ok(Fits { mu_c, thouless, peaks, epsilon })
}
