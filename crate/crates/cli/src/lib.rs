//! Sweeps, spectrum cache, derived tables and crossover fits for the Lévy
//! SYK model, plus the building blocks of the `lsyk` command-line tool.

pub mod cache;
pub mod config;
pub mod fit;
pub mod io;
pub mod sweep;

use std::path::Path;

use anyhow::Result;

use crate::cache::SpectrumCache;
use crate::config::EnsembleSpec;
use crate::fit::{fit_all, Fits};
use crate::io::{read_csv, write_csv, write_json};
use crate::sweep::{run_sweep, CellOptions, Dataset};

/// Runs a sweep, writes its tables and fits into `spec.out`, and returns both.
pub fn sweep_and_fit(spec: &EnsembleSpec, jobs: usize, opts: CellOptions) -> Result<(Dataset, Fits)> {
    let cache = SpectrumCache::new(&spec.out);
    let data = run_sweep(spec, &cache, jobs, opts)?;
    data.write_tables(&spec.out)?;
    write_json(&spec.out.join("sweep.json"), spec)?;
    let fits = fit_dir(&spec.out, spec.r_threshold, spec.closeness)?;
    log::info!(
        "sweep done: {} spectra diagonalized, {} read from cache",
        cache.stats.computed(),
        cache.stats.hits()
    );
    Ok((data, fits))
}

/// Fits the tables found in `dir` and writes `fits.json` and `mu_c.csv`.
pub fn fit_dir(dir: &Path, r_threshold: f64, closeness: f64) -> Result<Fits> {
    let r = read_csv(&dir.join("r_table.csv"))?;
    let edge = read_csv(&dir.join("edge_table.csv"))?;
    let th_path = dir.join("thouless_table.csv");
    let th = if th_path.exists() { read_csv(&th_path)? } else { Vec::new() };
    let fits = fit_all(&r, &edge, &th, r_threshold, closeness)?;
    write_json(&dir.join("fits.json"), &fits)?;
    write_csv(&dir.join("mu_c.csv"), &fits.mu_c_rows())?;
    Ok(fits)
}
