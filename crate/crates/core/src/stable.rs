//! Symmetric α-stable (Lévy) draws and the SYK coupling tensor.
//!
//! Draws use the Chambers–Mallows–Stuck transform with characteristic
//! function `exp(-|σk|^μ)`. At `μ = 2` this is a Gaussian of variance `2σ²`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};

/// Generator used for every realization.
pub type RealizationRng = ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of realization `index` in an ensemble with `base_seed`.
pub fn realization_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> RealizationRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub mu: f64,
    pub sigma: f64,
}

impl StableParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 2.0) {
            bail!(Parameter, "stability index mu={mu} outside (0, 2]");
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            bail!(Parameter, "scale sigma={sigma} must be positive and finite");
        }
        Ok(Self { mu, sigma })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sigma * sample_standard(self.mu, rng)
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

/// CMS transform of an angle `v ∈ (-π/2, π/2)` and an exponential variate `w > 0`
/// into a unit-scale symmetric stable variate.
pub fn cms_transform(mu: f64, v: f64, w: f64) -> f64 {
    if mu == 1.0 {
        return v.tan();
    }
    let a = (mu * v).sin() / v.cos().powf(1.0 / mu);
    let b = (((1.0 - mu) * v).cos() / w).powf((1.0 - mu) / mu);
    a * b
}

/// One unit-scale draw. Consumes exactly two uniforms unless one lands on an
/// excluded endpoint.
pub fn sample_standard<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        let e: f64 = rng.random();
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let v = PI * (u - 0.5);
        let w = -e.ln();
        let x = cms_transform(mu, v, w);
        if x.is_finite() {
            return x;
        }
    }
}

pub fn binomial(n: usize, k: usize) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u64)? / (i as u64 + 1);
    }
    Some(acc)
}

/// Lexicographic `q`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    cur: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(n: usize, q: usize) -> Self {
        Self { n, cur: (0..q).collect(), done: q > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let q = self.cur.len();
        let mut i = q;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] < self.n - q + i {
                self.cur[i] += 1;
                for j in i + 1..q {
                    self.cur[j] = self.cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Scale of the coupling distribution: `J·((q−1)!/N^{q−1})^{1/μ}`.
pub fn coupling_scale(n: usize, q: usize, j: f64, mu: f64) -> f64 {
    let fact: f64 = (1..q).map(|k| k as f64).product();
    j * (fact / (n as f64).powi(q as i32 - 1)).powf(1.0 / mu)
}

/// One realization of the `C(N, q)` couplings, stored in lexicographic order of
/// their index tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingTensor {
    #[serde(rename = "N")]
    pub n_fermions: usize,
    pub q: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub mu: f64,
    pub seed: u64,
    pub values: Vec<f64>,
}

impl CouplingTensor {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index tuples in the same order as `values`.
    pub fn tuples(&self) -> Combinations {
        Combinations::new(self.n_fermions, self.q)
    }
}

pub fn validate_model(n: usize, q: usize, j: f64, mu: f64) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        bail!(Parameter, "N={n} must be a positive even number");
    }
    if n > 128 {
        bail!(Parameter, "N={n} exceeds the 128-fermion limit");
    }
    if q < 2 || q % 2 != 0 || q > n {
        bail!(Parameter, "q={q} must be even with 2 <= q <= N={n}");
    }
    if !(mu > 0.0 && mu <= 2.0) {
        bail!(Parameter, "mu={mu} outside (0, 2]");
    }
    if !(j > 0.0 && j.is_finite()) {
        bail!(Parameter, "J={j} must be positive");
    }
    Ok(())
}

/// Draws the couplings of one realization from the stream seeded by `seed`.
pub fn sample_couplings(n: usize, q: usize, j: f64, mu: f64, seed: u64) -> Result<CouplingTensor> {
    let mut rng = rng_from_seed(seed);
    sample_couplings_with(n, q, j, mu, seed, &mut rng)
}

/// Same as [`sample_couplings`] but drawing from a caller-owned generator;
/// `seed` is only recorded.
pub fn sample_couplings_with<R: Rng + ?Sized>(
    n: usize,
    q: usize,
    j: f64,
    mu: f64,
    seed: u64,
    rng: &mut R,
) -> Result<CouplingTensor> {
    validate_model(n, q, j, mu)?;
    let count = binomial(n, q).ok_or_else(|| crate::Error::Parameter(alloc::format!("C({n},{q}) overflows")))?;
    let params = StableParams::new(mu, coupling_scale(n, q, j, mu))?;
    let values = params.sample_n(count as usize, rng);
    Ok(CouplingTensor { n_fermions: n, q, j, mu, seed, values })
}

/// Hill estimate of the tail index from the `k` largest magnitudes.
pub fn tail_index_estimate(samples: &[f64], k: usize) -> Result<f64> {
    let n = samples.len();
    if k == 0 || k >= n {
        bail!(Parameter, "k={k} must satisfy 0 < k < n={n}");
    }
    let mut mags: Vec<f64> = samples.iter().map(|x| x.abs()).collect();
    // After this call mags[k] is the (k+1)-th largest and mags[..k] the top k.
    mags.select_nth_unstable_by(k, |a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let threshold = mags[k];
    if !(threshold > 0.0) {
        bail!(Degenerate, "threshold order statistic is zero");
    }
    let h: f64 = mags[..k].iter().map(|x| (x / threshold).ln()).sum::<f64>() / k as f64;
    if !(h > 0.0) {
        bail!(Degenerate, "top {k} magnitudes are all equal");
    }
    Ok(1.0 / h)
}
