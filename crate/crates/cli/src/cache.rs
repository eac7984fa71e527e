//! On-disk spectrum cache: one JSON file per realization under
//! `{root}/spectra/{sector}-{deformation}/N{N}_q{q}_mu{mu}_s{seed}.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{Context, Result};
use levy_syk::eigen::{full_spectrum, Spectrum, SpectrumMeta};
use levy_syk::syk::{Realization, SykConfig};
use log::warn;

#[derive(Debug, Default)]
pub struct CacheStats {
    pub hits: AtomicUsize,
    pub computed: AtomicUsize,
    pub mismatched: AtomicUsize,
}

impl CacheStats {
    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }
    pub fn computed(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }
    pub fn mismatched(&self) -> usize {
        self.mismatched.load(Ordering::Relaxed)
    }
}

#[derive(Debug)]
pub struct SpectrumCache {
    root: PathBuf,
    /// When false every spectrum is recomputed and nothing is written.
    enabled: bool,
    pub stats: CacheStats,
}

impl SpectrumCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), enabled: true, stats: CacheStats::default() }
    }

    pub fn disabled() -> Self {
        Self { root: PathBuf::new(), enabled: false, stats: CacheStats::default() }
    }

    pub fn path_for(&self, meta: &SpectrumMeta) -> PathBuf {
        self.root
            .join("spectra")
            .join(format!("{}-{}", meta.sector.as_str(), meta.deformation))
            .join(format!("{}.json", meta.file_stem()))
    }

    /// Cached spectrum for `meta`, if a file with identical metadata exists.
    pub fn load(&self, meta: &SpectrumMeta) -> Option<Spectrum> {
        if !self.enabled {
            return None;
        }
        let path = self.path_for(meta);
        let text = fs::read_to_string(&path).ok()?;
        match serde_json::from_str::<Spectrum>(&text) {
            Ok(s) if s.meta == *meta => Some(s),
            Ok(_) => {
                warn!("{}: metadata differs from the request; recomputing", path.display());
                self.stats.mismatched.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(e) => {
                warn!("{}: unreadable ({e}); recomputing", path.display());
                self.stats.mismatched.fetch_add(1, Ordering::Relaxed);
                None
            }
        }
    }

    /// Writes through a temporary file so readers never see a partial file.
    pub fn store(&self, spectrum: &Spectrum) -> Result<()> {
        if !self.enabled {
            return Ok(());
        }
        let path = self.path_for(&spectrum.meta);
        let dir = path.parent().expect("cache paths have a parent");
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
            serde_json::to_writer(&mut f, spectrum)?;
            f.write_all(b"\n")?;
        }
        fs::rename(&tmp, &path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    /// Spectrum of `config`, from the cache or by sampling and diagonalizing.
    pub fn spectrum(&self, config: &SykConfig) -> Result<Spectrum> {
        let meta = SpectrumMeta::for_config(config)?;
        if let Some(s) = self.load(&meta) {
            self.stats.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(s);
        }
        let r = Realization::sample(config)?;
        let s = full_spectrum(&r.hamiltonian, meta)?;
        self.stats.computed.fetch_add(1, Ordering::Relaxed);
        self.store(&s)?;
        Ok(s)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}
