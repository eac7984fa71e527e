//! Ensemble specification and its flat TOML file format.
//!
//! ```toml
//! N_list = [14, 16, 18, 20, 22]
//! mu_min = 0.1            # or: mu_list = [0.5, 1.0, 2.0]
//! mu_max = 2.0
//! mu_step = 0.1
//! realizations = 200
//! base_seed = 1
//! eta = 0.3               # Gaussian filter width, in units of the spectrum std
//! r_threshold = "main"    # "main" (0.10), "supplement" (0.01) or a number
//! thouless_threshold = 0.1
//! closeness = 1.0
//! tau_min = 1e-4
//! tau_max = 10.0
//! tau_points = 2000
//! smooth_window = 41
//! out = "out"
//! ```

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use levy_syk::spectral::TauGridSpec;
use serde::{Deserialize, Serialize};

pub const MAIN_THRESHOLD: f64 = 0.10;
pub const SUPPLEMENT_THRESHOLD: f64 = 0.01;

/// `r_threshold` accepts a preset name or a number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threshold {
    Value(f64),
    Preset(String),
}

impl Threshold {
    pub fn value(&self) -> Result<f64> {
        match self {
            Threshold::Value(v) => Ok(*v),
            Threshold::Preset(p) => preset(p),
        }
    }
}

pub fn preset(name: &str) -> Result<f64> {
    match name {
        "main" => Ok(MAIN_THRESHOLD),
        "supplement" => Ok(SUPPLEMENT_THRESHOLD),
        _ => bail!("unknown r_threshold preset '{name}' (expected main or supplement)"),
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "N_list")]
    n_list: Vec<usize>,
    mu_list: Option<Vec<f64>>,
    mu_min: Option<f64>,
    mu_max: Option<f64>,
    mu_step: Option<f64>,
    realizations: usize,
    #[serde(default)]
    base_seed: u64,
    #[serde(default = "default_eta")]
    eta: f64,
    #[serde(default = "default_threshold")]
    r_threshold: Threshold,
    #[serde(default = "default_thouless")]
    thouless_threshold: f64,
    #[serde(default = "default_closeness")]
    closeness: f64,
    #[serde(default = "default_window")]
    r_window: f64,
    #[serde(default = "default_tau_min")]
    tau_min: f64,
    #[serde(default = "default_tau_max")]
    tau_max: f64,
    #[serde(default = "default_tau_points")]
    tau_points: usize,
    #[serde(default = "default_smooth")]
    smooth_window: usize,
    #[serde(default = "default_out")]
    out: PathBuf,
}

fn default_eta() -> f64 {
    0.3
}
fn default_threshold() -> Threshold {
    Threshold::Preset("main".into())
}
fn default_thouless() -> f64 {
    0.1
}
fn default_closeness() -> f64 {
    1.0
}
fn default_window() -> f64 {
    1.0 / 3.0
}
fn default_tau_min() -> f64 {
    1e-4
}
fn default_tau_max() -> f64 {
    10.0
}
fn default_tau_points() -> usize {
    2000
}
fn default_smooth() -> usize {
    41
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// A validated ensemble sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSpec {
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub mu_list: Vec<f64>,
    pub realizations: usize,
    pub base_seed: u64,
    pub eta: f64,
    pub r_threshold: f64,
    pub thouless_threshold: f64,
    /// `τ_Th` at or above this value counts as "not yet matched" when
    /// bracketing `μ_{c,2}`.
    pub closeness: f64,
    pub r_window: f64,
    pub tau: TauGridSpec,
    pub smooth_window: usize,
    pub out: PathBuf,
}

/// `min, min+step, …, max` with values rounded to 10 decimals so that file
/// names and table keys print cleanly.
pub fn mu_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && max >= min) {
        bail!("bad mu grid: min={min}, max={max}, step={step}");
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((min + k as f64 * step) * 1e10).round() / 1e10).collect())
}

impl EnsembleSpec {
    pub fn new(n_list: Vec<usize>, mu_list: Vec<f64>, realizations: usize, base_seed: u64) -> Result<Self> {
        let s = Self {
            n_list,
            mu_list,
            realizations,
            base_seed,
            eta: default_eta(),
            r_threshold: MAIN_THRESHOLD,
            thouless_threshold: default_thouless(),
            closeness: default_closeness(),
            r_window: default_window(),
            tau: TauGridSpec { min: default_tau_min(), max: default_tau_max(), points: default_tau_points() },
            smooth_window: default_smooth(),
            out: default_out(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).context("parsing ensemble config")?;
        let mu_list = match (raw.mu_list, raw.mu_min, raw.mu_max, raw.mu_step) {
            (Some(l), None, None, None) => l,
            (None, Some(a), Some(b), Some(s)) => mu_grid(a, b, s)?,
            _ => bail!("give either mu_list or all of mu_min, mu_max, mu_step"),
        };
        let s = Self {
            n_list: raw.n_list,
            mu_list,
            realizations: raw.realizations,
            base_seed: raw.base_seed,
            eta: raw.eta,
            r_threshold: raw.r_threshold.value()?,
            thouless_threshold: raw.thouless_threshold,
            closeness: raw.closeness,
            r_window: raw.r_window,
            tau: TauGridSpec { min: raw.tau_min, max: raw.tau_max, points: raw.tau_points },
            smooth_window: raw.smooth_window,
            out: raw.out,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() || self.mu_list.is_empty() {
            bail!("N_list and mu list must be non-empty");
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n % 2 != 0 || n < 6 || n > 40) {
            bail!("N={n} must be even and in [6, 40]");
        }
        if let Some(m) = self.mu_list.iter().find(|&&m| !(m > 0.0 && m <= 2.0)) {
            bail!("mu={m} outside (0, 2]");
        }
        if self.realizations < 1 {
            bail!("realizations must be at least 1");
        }
        for (name, v) in [("r_threshold", self.r_threshold), ("thouless_threshold", self.thouless_threshold)] {
            if !(v > 0.0 && v < 1.0) {
                bail!("{name}={v} must lie in (0, 1)");
            }
        }
        if !(0.1..=0.5).contains(&self.eta) {
            bail!("eta={} outside [0.1, 0.5]", self.eta);
        }
        if !(self.r_window > 0.0 && self.r_window <= 1.0) {
            bail!("r_window={} outside (0, 1]", self.r_window);
        }
        if self.smooth_window == 0 || self.smooth_window > self.tau.points {
            bail!("smooth_window must be in [1, tau_points]");
        }
        self.tau.grid().map_err(|e| anyhow::anyhow!("{e}"))?;
        Ok(())
    }

    /// This ensemble rendered back into the flat file format.
    pub fn to_toml(&self) -> String {
        let list = |v: &[String]| format!("[{}]", v.join(", "));
        let ns: Vec<String> = self.n_list.iter().map(|n| n.to_string()).collect();
        let mus: Vec<String> = self.mu_list.iter().map(|m| format!("{m:?}")).collect();
        format!(
            "N_list = {}\nmu_list = {}\nrealizations = {}\nbase_seed = {}\neta = {:?}\nr_threshold = {:?}\n\
             thouless_threshold = {:?}\ncloseness = {:?}\nr_window = {:?}\ntau_min = {:?}\ntau_max = {:?}\n\
             tau_points = {}\nsmooth_window = {}\nout = {:?}\n",
            list(&ns),
            list(&mus),
            self.realizations,
            self.base_seed,
            self.eta,
            self.r_threshold,
            self.thouless_threshold,
            self.closeness,
            self.r_window,
            self.tau.min,
            self.tau.max,
            self.tau.points,
            self.smooth_window,
            self.out.display().to_string(),
        )
    }
}
