//! Ensemble sweeps over `(N, μ, realization)`.
//!
//! Realization `k` of every `(N, μ)` cell uses the seed
//! `realization_seed(base_seed, k)`, so cells at different `μ` share their
//! random numbers. Work inside a cell runs on a rayon pool; results are
//! collected in realization order and reduced sequentially, which keeps every
//! derived number independent of the worker count.

use std::path::Path;

use anyhow::{anyhow, Context, Result};
use levy_syk::edge::{a_ratio, ground_state_stats, lowest_two, MIN_GAP_REALIZATIONS};
use levy_syk::eigen::{dedupe_kramers, Spectrum, KRAMERS_REL_TOL};
use levy_syk::majorana::{symmetry_class, SymmetryClass};
use levy_syk::spectral::{
    combine_sff, ensemble_mean, r_statistics, rmt_r_value, rmt_sff_reference, sff_peak, sff_terms, smooth_sff,
    thouless_time, unfold, SffCurve, SffTerms, UnfoldOptions, Unfolded,
};
use levy_syk::stable::realization_seed;
use levy_syk::syk::SykConfig;
use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::SpectrumCache;
use crate::config::EnsembleSpec;
use crate::io::{fmt_mu, write_csv};

/// Levels entering the statistics: GSE spectra lose their Kramers partners.
pub fn analysis_levels(spectrum: &Spectrum) -> Result<Spectrum> {
    if spectrum.meta.class == SymmetryClass::Gse && !spectrum.meta.kramers_deduped {
        Ok(dedupe_kramers(spectrum, KRAMERS_REL_TOL)?)
    } else {
        Ok(spectrum.clone())
    }
}

/// Unfolds with the default degree, dropping the degree until the staircase
/// fit is monotone. Returns the degree used.
pub fn unfold_robust(levels: &[f64]) -> Result<(Unfolded, usize)> {
    let base = UnfoldOptions::default();
    let mut last = None;
    for degree in (1..=base.degree).rev() {
        match unfold(levels, &UnfoldOptions { degree, ..base }) {
            Ok(u) => return Ok((u, degree)),
            Err(e) => last = Some(e),
        }
    }
    Err(anyhow!("unfolding failed at every degree: {}", last.map(|e| e.to_string()).unwrap_or_default()))
}

struct RealizationSummary {
    r_mean: f64,
    r_excluded: usize,
    e1: f64,
    e2: f64,
    sff: Option<SffTerms>,
    degree: usize,
}

/// One `(N, μ)` cell of a sweep.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub n: usize,
    pub mu: f64,
    pub class: SymmetryClass,
    pub realizations: usize,
    pub r_mean: f64,
    pub r_err: f64,
    pub r_excluded: usize,
    pub e_min: Vec<f64>,
    pub gaps: Vec<(f64, f64)>,
    pub sff: Option<SffCurve>,
    pub sff_smooth: Option<SffCurve>,
    pub tau_th: Option<f64>,
    /// Realizations unfolded below the default polynomial degree.
    pub unfold_fallbacks: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CellOptions {
    pub with_sff: bool,
}

/// Runs `count` realizations of one cell, starting at realization index 0.
pub fn run_cell(
    spec: &EnsembleSpec,
    n: usize,
    mu: f64,
    count: usize,
    cache: &SpectrumCache,
    pool: &rayon::ThreadPool,
    opts: CellOptions,
) -> Result<CellResult> {
    let class = symmetry_class(n)?;
    let tau = spec.tau.grid()?;
    let eta = Some(spec.eta);
    let summaries: Vec<RealizationSummary> = pool.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|k| -> Result<RealizationSummary> {
                let cfg = SykConfig::new(n, mu, realization_seed(spec.base_seed, k));
                let s = analysis_levels(&cache.spectrum(&cfg)?)?;
                let r = r_statistics(&s, spec.r_window)?;
                let (e1, e2) = lowest_two(&s)?;
                let (sff, degree) = if opts.with_sff {
                    let (u, d) = unfold_robust(&s.eigenvalues)?;
                    (Some(sff_terms(&u, eta, &tau)), d)
                } else {
                    (None, UnfoldOptions::default().degree)
                };
                Ok(RealizationSummary { r_mean: r.mean, r_excluded: r.excluded, e1, e2, sff, degree })
            })
            .collect::<Result<Vec<_>>>()
    })
    .with_context(|| format!("cell N={n}, mu={mu}"))?;

    let rs: Vec<f64> = summaries.iter().map(|s| s.r_mean).collect();
    let r = ensemble_mean(&rs)?;
    let e_min = summaries.iter().map(|s| s.e1).collect();
    let gaps = summaries.iter().map(|s| (s.e1, s.e2)).collect();
    let r_excluded = summaries.iter().map(|s| s.r_excluded).sum();
    let unfold_fallbacks = summaries.iter().filter(|s| s.degree < UnfoldOptions::default().degree).count();
    let (sff, sff_smooth, tau_th) = if opts.with_sff && count >= 2 {
        let terms: Vec<SffTerms> = summaries.into_iter().filter_map(|s| s.sff).collect();
        let curve = combine_sff(&tau, &terms)?;
        let smooth = smooth_sff(&curve, spec.smooth_window)?;
        let t = thouless_time(&smooth, class, spec.thouless_threshold);
        (Some(curve), Some(smooth), Some(t))
    } else {
        (None, None, None)
    };
    Ok(CellResult {
        n,
        mu,
        class,
        realizations: count,
        r_mean: r.mean,
        r_err: r.stderr,
        r_excluded,
        e_min,
        gaps,
        sff,
        sff_smooth,
        tau_th,
        unfold_fallbacks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    pub class: String,
    pub r_mean: f64,
    pub r_err: f64,
    pub r_rmt: f64,
    pub delta_r: f64,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    pub e_min_log_avg: f64,
    pub e_min_mean: f64,
    pub excluded: usize,
    pub a_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThoulessRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    pub tau_th: f64,
    pub peak_found: bool,
    pub tau_peak: Option<f64>,
    pub k_c_peak: Option<f64>,
    pub k_rmt_peak: Option<f64>,
    pub unfold_fallbacks: usize,
}

impl CellResult {
    pub fn r_row(&self) -> RRow {
        let r_rmt = rmt_r_value(self.class);
        RRow {
            n: self.n,
            mu: self.mu,
            class: self.class.as_str().into(),
            r_mean: self.r_mean,
            r_err: self.r_err,
            r_rmt,
            delta_r: (self.r_mean - r_rmt) / r_rmt,
            realizations: self.realizations,
        }
    }

    pub fn edge_row(&self) -> Result<EdgeRow> {
        let g = ground_state_stats(&self.e_min, 0)?;
        let a = if self.gaps.len() >= MIN_GAP_REALIZATIONS { Some(a_ratio(&self.gaps)?) } else { None };
        Ok(EdgeRow { n: self.n, mu: self.mu, e_min_log_avg: g.log_avg, e_min_mean: g.raw_avg, excluded: g.excluded, a_ratio: a })
    }

    pub fn thouless_row(&self) -> Option<ThoulessRow> {
        let (smooth, tau_th) = (self.sff_smooth.as_ref()?, self.tau_th?);
        let p = sff_peak(smooth, self.class, tau_th);
        let opt = |v: f64| if p.found { Some(v) } else { None };
        Some(ThoulessRow {
            n: self.n,
            mu: self.mu,
            tau_th,
            peak_found: p.found,
            tau_peak: opt(p.tau),
            k_c_peak: opt(p.k_c),
            k_rmt_peak: opt(p.k_rmt),
            unfold_fallbacks: self.unfold_fallbacks,
        })
    }

    /// Curve table `tau, K, K_dc, K_c, K_c_smooth, K_rmt`.
    pub fn sff_rows(&self) -> Option<Vec<[f64; 6]>> {
        let (c, s) = (self.sff.as_ref()?, self.sff_smooth.as_ref()?);
        Some(
            (0..c.tau.len())
                .map(|i| [c.tau[i], c.k[i], c.k_dc[i], c.k_c[i], s.k_c[i], rmt_sff_reference(self.class, c.tau[i])])
                .collect(),
        )
    }
}

/// All cells of a sweep, ordered by `N` then `μ` as listed in the `EnsembleSpec`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub cells: Vec<CellResult>,
}

impl Dataset {
    pub fn cell(&self, n: usize, mu: f64) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.n == n && (c.mu - mu).abs() < 1e-9)
    }

    pub fn r_rows(&self) -> Vec<RRow> {
        self.cells.iter().map(|c| c.r_row()).collect()
    }

    pub fn edge_rows(&self) -> Result<Vec<EdgeRow>> {
        self.cells.iter().map(|c| c.edge_row()).collect()
    }

    pub fn thouless_rows(&self) -> Vec<ThoulessRow> {
        self.cells.iter().filter_map(|c| c.thouless_row()).collect()
    }

    /// Writes `r_table.csv`, `edge_table.csv`, `thouless_table.csv` and one
    /// `sff/N{N}_mu{mu}.csv` curve per cell into `dir`.
    pub fn write_tables(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join("r_table.csv"), &self.r_rows())?;
        write_csv(&dir.join("edge_table.csv"), &self.edge_rows()?)?;
        let th = self.thouless_rows();
        if !th.is_empty() {
            write_csv(&dir.join("thouless_table.csv"), &th)?;
            let sff_dir = dir.join("sff");
            std::fs::create_dir_all(&sff_dir)?;
            for c in &self.cells {
                if let Some(rows) = c.sff_rows() {
                    let path = sff_dir.join(format!("N{}_mu{}.csv", c.n, fmt_mu(c.mu)));
                    let mut w = csv::Writer::from_path(&path)?;
                    w.write_record(["tau", "K", "K_dc", "K_c", "K_c_smooth", "K_rmt"])?;
                    for r in rows {
                        w.write_record(r.iter().map(|v| v.to_string()))?;
                    }
                    w.flush()?;
                }
            }
        }
        Ok(())
    }
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?)
}

/// Runs every `(N, μ)` cell of `spec` with `spec.realizations` each.
pub fn run_sweep(spec: &EnsembleSpec, cache: &SpectrumCache, jobs: usize, opts: CellOptions) -> Result<Dataset> {
    spec.validate()?;
    let pool = thread_pool(jobs)?;
    let mut cells = Vec::with_capacity(spec.n_list.len() * spec.mu_list.len());
    for &n in &spec.n_list {
        for &mu in &spec.mu_list {
            let before = cache.stats.computed();
            let c = run_cell(spec, n, mu, spec.realizations, cache, &pool, opts)?;
            info!(
                "N={n} mu={mu}: <r>={:.4}±{:.4}, {} diagonalized, {} from cache",
                c.r_mean,
                c.r_err,
                cache.stats.computed() - before,
                spec.realizations - (cache.stats.computed() - before)
            );
            cells.push(c);
        }
    }
    Ok(Dataset { cells })
}
