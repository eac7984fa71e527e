use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use levy_syk::eigen::eigenvalues;
use levy_syk::hierarchy::{
    census_slope, hierarchy_census, interaction_graph, merge_census, outlier_ratio, perturbative_spectrum,
    relative_rms_error, GraphMode, PtMethod, PtOptions,
};
use levy_syk::majorana::Sector;
use levy_syk::sfd::{level_spacing_stages, sfd_empirical_normalized, sfd_levy};
use levy_syk::stable::{realization_seed, rng_from_seed, sample_couplings, StableParams};
use levy_syk::syk::{Deformation, Realization, SykConfig};
use levy_syk_cli::cache::SpectrumCache;
use levy_syk_cli::config::{preset, EnsembleSpec};
use levy_syk_cli::io::{fmt_mu, write_csv, write_json};
use levy_syk_cli::sweep::{run_cell, thread_pool, CellOptions, Dataset};
use levy_syk_cli::{fit_dir, sweep_and_fit};

#[derive(Parser)]
#[command(name = "lsyk", version, about = "Lévy SYK spectra, statistics and crossover fits")]
struct Cli {
    /// Ensemble config file (flat TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Model {
    /// Number of Majorana fermions.
    #[arg(short = 'N', long = "n")]
    n: usize,
    /// Stability index in (0, 2].
    #[arg(long)]
    mu: f64,
}

#[derive(Args, Clone)]
struct Grid {
    /// Comma-separated sizes.
    #[arg(short = 'N', long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Comma-separated stability indices.
    #[arg(long, value_delimiter = ',', required = true)]
    mu: Vec<f64>,
    #[arg(short = 'R', long, default_value_t = 100)]
    realizations: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample coupling tensors and write them as JSON.
    Sample {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Build, diagonalize and cache spectra.
    Spectrum {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// even, odd or full.
        #[arg(long, default_value = "even")]
        sector: Sector,
        /// none, mass or defect[:site].
        #[arg(long, default_value = "none")]
        deformation: String,
    },
    /// Mean gap ratio per (N, mu).
    Rstat {
        #[command(flatten)]
        grid: Grid,
    },
    /// Connected spectral form factor, Thouless time and peak for each (N, mu).
    Sff {
        #[command(flatten)]
        grid: Grid,
    },
    /// Ground-state energies, gap ratio A and the energy density slope.
    Edge {
        #[command(flatten)]
        grid: Grid,
    },
    /// Coupling-magnitude census, outlier ratios, interaction graph and the
    /// perturbative spectrum around the dominant term.
    Hierarchy {
        #[command(flatten)]
        model: Model,
        #[arg(long, default_value_t = 100)]
        tensors: usize,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        /// Relative cutoff for the interaction graph of the first tensor.
        #[arg(long)]
        graph_cutoff: Option<f64>,
        /// Compare the perturbative and exact spectra of this many tensors.
        #[arg(long, default_value_t = 0)]
        pt: usize,
        /// Use the literal non-degenerate second-order formula.
        #[arg(long)]
        nondegenerate: bool,
    },
    /// Fractal-spectrum pipeline around a dominant coupling.
    Sfd {
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.75)]
        b: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Also compare the Lévy SFD with an empirical one from this many draws.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Full ensemble sweep from a config file: tables and fits.
    Sweep {
        /// Skip the form factor (r and edge tables only).
        #[arg(long)]
        no_sff: bool,
    },
    /// Refit the tables of a finished sweep.
    Fit {
        /// Threshold preset or value for the configured mu_c fit.
        #[arg(long)]
        threshold: Option<String>,
    },
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

fn load_spec(cli: &Cli) -> Result<EnsembleSpec> {
    let Some(path) = &cli.config else { bail!("this subcommand needs --config <file>") };
    let mut spec = EnsembleSpec::from_file(path)?;
    if let Some(s) = cli.seed {
        spec.base_seed = s;
    }
    if let Some(o) = &cli.out {
        spec.out = o.clone();
    }
    Ok(spec)
}

/// Spec for the per-grid subcommands: the config file when given, else defaults.
fn grid_spec(cli: &Cli, grid: &Grid) -> Result<EnsembleSpec> {
    let mut spec = match &cli.config {
        Some(_) => load_spec(cli)?,
        None => EnsembleSpec::new(grid.n.clone(), grid.mu.clone(), grid.realizations, cli.seed.unwrap_or(0))?,
    };
    spec.n_list = grid.n.clone();
    spec.mu_list = grid.mu.clone();
    spec.realizations = grid.realizations;
    spec.out = out_dir(cli);
    spec.validate()?;
    Ok(spec)
}

fn run_grid(cli: &Cli, grid: &Grid, with_sff: bool) -> Result<(EnsembleSpec, Dataset)> {
    let spec = grid_spec(cli, grid)?;
    let cache = SpectrumCache::new(&spec.out);
    let pool = thread_pool(cli.jobs)?;
    let mut cells = Vec::new();
    for &n in &spec.n_list {
        for &mu in &spec.mu_list {
            cells.push(run_cell(&spec, n, mu, spec.realizations, &cache, &pool, CellOptions { with_sff })?);
        }
    }
    Ok((spec, Dataset { cells }))
}

fn print_csv<T: serde::Serialize>(rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_sample(cli: &Cli, model: &Model, count: usize) -> Result<()> {
    let base = cli.seed.unwrap_or(0);
    let dir = out_dir(cli).join("couplings");
    for k in 0..count as u64 {
        let seed = if count == 1 { base } else { realization_seed(base, k) };
        let t = sample_couplings(model.n, 4, 1.0, model.mu, seed)?;
        let path = dir.join(format!("N{}_q4_mu{}_s{}.json", model.n, fmt_mu(model.mu), seed));
        write_json(&path, &t)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_spectrum(cli: &Cli, model: &Model, count: usize, sector: Sector, deformation: &str) -> Result<()> {
    let base = cli.seed.unwrap_or(0);
    let cache = SpectrumCache::new(out_dir(cli));
    let d = Deformation::parse(deformation)?;
    for k in 0..count as u64 {
        let seed = if count == 1 { base } else { realization_seed(base, k) };
        let mut cfg = SykConfig::new(model.n, model.mu, seed).with_deformation(d);
        if d == Deformation::None {
            cfg.sector = sector;
        }
        let s = cache.spectrum(&cfg)?;
        let e = &s.eigenvalues;
        println!(
            "{}  levels={} class={} E_min={} E_max={}",
            cache.path_for(&s.meta).display(),
            e.len(),
            s.meta.class.as_str(),
            e[0],
            e[e.len() - 1]
        );
    }
    log::info!("{} diagonalized, {} from cache", cache.stats.computed(), cache.stats.hits());
    Ok(())
}

fn cmd_hierarchy(
    cli: &Cli,
    model: &Model,
    tensors: usize,
    bins: usize,
    graph_cutoff: Option<f64>,
    pt: usize,
    nondegenerate: bool,
) -> Result<()> {
    if tensors == 0 {
        bail!("--tensors must be positive");
    }
    let base = cli.seed.unwrap_or(0);
    let dir = out_dir(cli).join("hierarchy");
    let stem = format!("N{}_mu{}", model.n, fmt_mu(model.mu));
    let tensor = |k: u64| sample_couplings(model.n, 4, 1.0, model.mu, realization_seed(base, k));
    let first = tensor(0)?;
    let mut ratios = vec![outlier_ratio(&first.values)?];
    let census = if model.mu < 2.0 {
        let mut acc = hierarchy_census(&first, bins)?;
        for k in 1..tensors as u64 {
            let t = tensor(k)?;
            merge_census(&mut acc, &hierarchy_census(&t, bins)?)?;
            ratios.push(outlier_ratio(&t.values)?);
        }
        Some(acc)
    } else {
        for k in 1..tensors as u64 {
            ratios.push(outlier_ratio(&tensor(k)?.values)?);
        }
        None
    };
    let mut sorted = ratios.clone();
    sorted.sort_by(f64::total_cmp);
    println!("median outlier ratio |J_max|/sum(others) = {}", sorted[sorted.len() / 2]);
    if let Some(rows) = &census {
        write_csv(&dir.join(format!("census_{stem}.csv")), rows)?;
        let fit = census_slope(rows)?;
        println!(
            "census slope {} ± {} (prediction -ln(count) = {})",
            fit.slope,
            fit.slope_stderr,
            -(first.values.len() as f64).ln()
        );
    }
    if let Some(c) = graph_cutoff {
        let edges = interaction_graph(&first, c, GraphMode::Hyperedges)?;
        let rows: Vec<(String, f64)> = edges
            .iter()
            .map(|e| (e.fermions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" "), e.weight))
            .collect();
        let path = dir.join(format!("graph_{stem}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["fermions", "weight"])?;
        for (f, wt) in rows {
            w.write_record([f, wt.to_string()])?;
        }
        w.flush()?;
        println!("{} hyperedges above {c} x max -> {}", edges.len(), path.display());
    }
    if pt > 0 {
        let method = if nondegenerate { PtMethod::Nondegenerate } else { PtMethod::Degenerate };
        let opts = PtOptions { method, ..PtOptions::default() };
        let mut w = csv::Writer::from_path(dir.join(format!("pt_{stem}.csv")))?;
        w.write_record(["seed", "dominance_ratio", "rel_rms", "skipped_pairs"])?;
        for k in 0..pt as u64 {
            let seed = realization_seed(base, k);
            let r = Realization::sample(&SykConfig::new(model.n, model.mu, seed))?;
            match perturbative_spectrum(&r.terms, Sector::Even, model.n, &opts) {
                Ok(p) => {
                    let exact = eigenvalues(&r.hamiltonian)?;
                    let err = relative_rms_error(&p.estimates, &exact)?;
                    w.write_record([seed.to_string(), p.dominance_ratio.to_string(), err.to_string(), p.skipped_pairs.to_string()])?;
                }
                Err(e) => log::warn!("seed {seed}: {e}"),
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn cmd_sfd(cli: &Cli, mu: f64, a: f64, b: f64, r: f64, samples: Option<usize>) -> Result<()> {
    let st = level_spacing_stages(mu, a, b, r)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "stage,alpha,f")?;
    for (name, f) in [
        ("levy", &st.levy),
        ("diagonal", &st.diagonal),
        ("squared", &st.squared),
        ("ratio", &st.ratio),
        ("same_sector", &st.same_sector),
        ("cross_sector", &st.cross_sector),
        ("eigenvalue", &st.eigenvalue),
        ("spacing", &st.spacing),
    ] {
        for (al, v) in f.breakpoints() {
            writeln!(out, "{name},{al},{v}")?;
        }
    }
    if let Some(n) = samples {
        if mu >= 2.0 {
            bail!("the Lévy SFD needs mu < 2");
        }
        // in units of the scale N^{1/mu} that sets alpha = 0
        let u = (n as f64).powf(1.0 / mu);
        let x: Vec<f64> = StableParams::new(mu, 1.0)?
            .sample_n(n, &mut rng_from_seed(cli.seed.unwrap_or(0)))
            .into_iter()
            .map(|v| v / u)
            .collect();
        let emp = sfd_empirical_normalized(&x, 50)?;
        let exact = sfd_levy(mu)?;
        let peak = exact.typical_alpha().unwrap_or(1.0 / mu);
        let d = emp.sup_distance(&exact, 0.1, 0.9 * peak);
        eprintln!("empirical vs exact Lévy SFD on [0.1, {}]: sup distance {d}", 0.9 * peak);
    }
    Ok(())
}

fn cmd_grid(cli: &Cli, grid: &Grid, which: &str) -> Result<()> {
    let (spec, data) = run_grid(cli, grid, which == "sff")?;
    let dir = &spec.out;
    match which {
        "rstat" => {
            let rows = data.r_rows();
            write_csv(&dir.join("rstat.csv"), &rows)?;
            print_csv(&rows)?;
        }
        "edge" => {
            let rows = data.edge_rows()?;
            write_csv(&dir.join("edge.csv"), &rows)?;
            print_csv(&rows)?;
            let fits = levy_syk_cli::fit::fit_all(&data.r_rows(), &rows, &[], spec.r_threshold, spec.closeness)?;
            for (mu, f) in fits.epsilon {
                eprintln!("mu={mu}: epsilon = {} ± {}", f.slope, f.slope_stderr);
            }
        }
        _ => {
            for c in &data.cells {
                if let Some(rows) = c.sff_rows() {
                    let path = dir.join("sff").join(format!("N{}_mu{}.csv", c.n, fmt_mu(c.mu)));
                    std::fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
                    let mut w = csv::Writer::from_path(&path)?;
                    w.write_record(["tau", "K", "K_dc", "K_c", "K_c_smooth", "K_rmt"])?;
                    for r in rows {
                        w.write_record(r.iter().map(|v| v.to_string()))?;
                    }
                    w.flush()?;
                }
            }
            let rows = data.thouless_rows();
            write_csv(&dir.join("thouless.csv"), &rows)?;
            print_csv(&rows)?;
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.cmd {
        Cmd::Sample { model, count } => cmd_sample(cli, model, *count),
        Cmd::Spectrum { model, count, sector, deformation } => cmd_spectrum(cli, model, *count, *sector, deformation),
        Cmd::Rstat { grid } => cmd_grid(cli, grid, "rstat"),
        Cmd::Sff { grid } => cmd_grid(cli, grid, "sff"),
        Cmd::Edge { grid } => cmd_grid(cli, grid, "edge"),
        Cmd::Hierarchy { model, tensors, bins, graph_cutoff, pt, nondegenerate } => {
            cmd_hierarchy(cli, model, *tensors, *bins, *graph_cutoff, *pt, *nondegenerate)
        }
        Cmd::Sfd { mu, a, b, r, samples } => cmd_sfd(cli, *mu, *a, *b, *r, *samples),
        Cmd::Sweep { no_sff } => {
            let spec = load_spec(cli)?;
            let (_, fits) = sweep_and_fit(&spec, cli.jobs, CellOptions { with_sff: !no_sff })?;
            for f in &fits.mu_c {
                eprintln!("{} (threshold {}): eta1 = {:?}, mu_c = {:?}", f.label, f.threshold, f.eta1, f.mu_c);
            }
            println!("{}", spec.out.display());
            Ok(())
        }
        Cmd::Fit { threshold } => {
            let dir = out_dir(cli);
            let (mut thr, mut closeness) = (0.10, 1.0);
            if cli.config.is_some() {
                let spec = load_spec(cli)?;
                thr = spec.r_threshold;
                closeness = spec.closeness;
            }
            if let Some(t) = threshold {
                thr = t.parse::<f64>().or_else(|_| preset(t))?;
            }
            let fits = fit_dir(&dir, thr, closeness).with_context(|| format!("fitting tables in {}", dir.display()))?;
            println!("{}", serde_json::to_string_pretty(&fits)?);
            Ok(())
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
