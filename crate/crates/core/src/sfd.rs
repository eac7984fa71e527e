//! Spectra of fractal dimensions (SFDs).
//!
//! A variable `X` drawn `𝒩` times has SFD `f` when about `𝒩^{f(α)}` of the
//! draws have magnitude `𝒩^{-α}`. Magnitudes are normalized to the largest
//! scale, so `α ≥ 0`, and only `f ≥ 0` (at least one draw) is kept.
//!
//! SFDs here are exact piecewise-linear functions stored as closed segments.
//! Consecutive segments share endpoints; a shared endpoint may carry two
//! different values, which is a jump. The value at a jump is the larger one.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};

/// Geometric tolerance for breakpoint comparisons.
pub const TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Seg {
    a0: f64,
    a1: f64,
    f0: f64,
    f1: f64,
}

impl Seg {
    fn new(a0: f64, a1: f64, f0: f64, f1: f64) -> Self {
        Self { a0, a1, f0, f1 }
    }

    fn point(a: f64, f: f64) -> Self {
        Self::new(a, a, f, f)
    }

    fn is_point(&self) -> bool {
        self.a1 - self.a0 <= TOL
    }

    fn slope(&self) -> f64 {
        if self.is_point() {
            0.0
        } else {
            (self.f1 - self.f0) / (self.a1 - self.a0)
        }
    }

    fn at(&self, a: f64) -> f64 {
        if self.is_point() {
            self.f0
        } else {
            self.f0 + (self.f1 - self.f0) * (a - self.a0) / (self.a1 - self.a0)
        }
    }

    fn covers(&self, a: f64) -> bool {
        a >= self.a0 - TOL && a <= self.a1 + TOL
    }

    /// Restriction to `[lo, hi]`, if non-empty.
    fn restrict(&self, lo: f64, hi: f64) -> Option<Seg> {
        let a0 = self.a0.max(lo);
        let a1 = self.a1.min(hi);
        if a1 < a0 - TOL {
            return None;
        }
        let a1 = a1.max(a0);
        Some(Seg::new(a0, a1, self.at(a0), self.at(a1)))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "SfdRepr", into = "SfdRepr")]
pub struct Sfd {
    segs: Vec<Seg>,
}

#[derive(Serialize, Deserialize)]
struct SfdRepr {
    breakpoints: Vec<(f64, f64)>,
}

impl TryFrom<SfdRepr> for Sfd {
    type Error = Error;
    fn try_from(r: SfdRepr) -> Result<Sfd> {
        Sfd::from_breakpoints(&r.breakpoints)
    }
}

impl From<Sfd> for SfdRepr {
    fn from(s: Sfd) -> SfdRepr {
        SfdRepr { breakpoints: s.breakpoints() }
    }
}

impl Sfd {
    /// The SFD of an identically zero variable (all mass at `α = ∞`).
    pub fn empty() -> Self {
        Self { segs: Vec::new() }
    }

    pub fn point_mass(alpha: f64, f: f64) -> Self {
        Self { segs: vec![Seg::point(alpha, f)] }
    }

    /// Builds an SFD from breakpoints with non-decreasing `α`. Two consecutive
    /// breakpoints with the same `α` encode a jump.
    pub fn from_breakpoints(points: &[(f64, f64)]) -> Result<Self> {
        for (i, &(a, f)) in points.iter().enumerate() {
            if !a.is_finite() || !f.is_finite() {
                bail!(Parameter, "breakpoint {i} is not finite");
            }
            if a < -TOL {
                bail!(Parameter, "breakpoint {i} has negative alpha {a}");
            }
            if i > 0 && a < points[i - 1].0 - TOL {
                bail!(Parameter, "breakpoints not sorted at index {i}");
            }
            if i > 1 && (a - points[i - 2].0).abs() <= TOL {
                bail!(Parameter, "more than two breakpoints at alpha {a}");
            }
        }
        match points.len() {
            0 => return Ok(Self::empty()),
            1 => return Ok(Self::point_mass(points[0].0, points[0].1)),
            _ => {}
        }
        let segs: Vec<Seg> = points
            .windows(2)
            .filter(|w| w[1].0 - w[0].0 > TOL)
            .map(|w| Seg::new(w[0].0, w[1].0, w[0].1, w[1].1))
            .collect();
        if segs.is_empty() {
            let f = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            return Ok(Self::point_mass(points[0].0, f));
        }
        Ok(Self { segs })
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    /// Breakpoints in increasing `α`; a jump shows up as a repeated `α`.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let push = |p: (f64, f64), out: &mut Vec<(f64, f64)>| {
            if let Some(last) = out.last() {
                if (last.0 - p.0).abs() <= TOL && (last.1 - p.1).abs() <= TOL {
                    return;
                }
            }
            out.push(p);
        };
        for s in &self.segs {
            push((s.a0, s.f0), &mut out);
            if !s.is_point() {
                push((s.a1, s.f1), &mut out);
            }
        }
        out
    }

    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.segs.first()?.a0, self.segs.last()?.a1))
    }

    /// `f(α)`, or `-∞` outside the support.
    pub fn value(&self, alpha: f64) -> f64 {
        self.segs
            .iter()
            .filter(|s| s.covers(alpha))
            .map(|s| s.at(alpha.clamp(s.a0, s.a1)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_value(&self) -> f64 {
        self.segs.iter().map(|s| s.f0.max(s.f1)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Typical exponent `α₀`: the smallest `α` where `f` is maximal.
    pub fn typical_alpha(&self) -> Option<f64> {
        let m = self.max_value();
        for s in &self.segs {
            if s.f0 >= m - TOL {
                return Some(s.a0);
            }
            if s.f1 >= m - TOL {
                return Some(s.a1);
            }
        }
        None
    }

    /// Structural equality up to `tol` on breakpoints.
    pub fn approx_eq(&self, other: &Sfd, tol: f64) -> bool {
        let a = self.breakpoints();
        let b = other.breakpoints();
        a.len() == b.len()
            && a.iter().zip(&b).all(|(p, q)| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol)
    }

    /// Largest `|f − g|` over `[lo, hi]` restricted to where both are finite.
    pub fn sup_distance(&self, other: &Sfd, lo: f64, hi: f64) -> f64 {
        let mut grid: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .map(|p| p.0)
            .filter(|a| *a >= lo && *a <= hi)
            .collect();
        grid.push(lo);
        grid.push(hi);
        let mut d: f64 = 0.0;
        for a in grid {
            // Probe both sides of every breakpoint so jumps are seen.
            for x in [a - 1e-9, a, a + 1e-9] {
                let (p, q) = (self.value(x), other.value(x));
                if p.is_finite() && q.is_finite() {
                    d = d.max((p - q).abs());
                }
            }
        }
        d
    }

    fn from_segs(segs: Vec<Seg>) -> Self {
        let env = envelope(segs);
        Self { segs: env }
    }

    /// Restriction to `α ≥ 0` and `f ≥ 0`.
    fn clipped(self) -> Self {
        let mut out = Vec::new();
        for s in self.segs {
            let Some(s) = s.restrict(0.0, f64::INFINITY) else { continue };
            let (lo, hi) = (s.f0.min(s.f1), s.f0.max(s.f1));
            if hi < -TOL {
                continue;
            }
            if lo >= -TOL {
                out.push(Seg::new(s.a0, s.a1, s.f0.max(0.0), s.f1.max(0.0)));
                continue;
            }
            let c = s.a0 + (s.a1 - s.a0) * (0.0 - s.f0) / (s.f1 - s.f0);
            if s.f0 >= 0.0 {
                out.push(Seg::new(s.a0, c, s.f0, 0.0));
            } else {
                out.push(Seg::new(c, s.a1, 0.0, s.f1));
            }
        }
        Self::from_segs(out)
    }
}

/// Upper envelope of a set of closed segments, merged into a canonical list.
fn envelope(mut segs: Vec<Seg>) -> Vec<Seg> {
    segs.retain(|s| s.a0.is_finite() && s.a1.is_finite() && s.f0.is_finite() && s.f1.is_finite());
    if segs.is_empty() {
        return segs;
    }
    if segs.iter().all(Seg::is_point) {
        segs.sort_by(|x, y| x.a0.total_cmp(&y.a0));
        let mut out: Vec<Seg> = Vec::new();
        for s in segs {
            match out.last_mut() {
                Some(l) if (l.a0 - s.a0).abs() <= TOL => {
                    l.f0 = l.f0.max(s.f0);
                    l.f1 = l.f0;
                }
                _ => out.push(s),
            }
        }
        return out;
    }
    segs.retain(|s| !s.is_point());

    let mut crit: Vec<f64> = Vec::with_capacity(segs.len() * 4);
    for s in &segs {
        crit.push(s.a0);
        crit.push(s.a1);
    }
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (p, q) = (&segs[i], &segs[j]);
            let lo = p.a0.max(q.a0);
            let hi = p.a1.min(q.a1);
            if hi - lo <= TOL {
                continue;
            }
            let dl = p.at(lo) - q.at(lo);
            let dh = p.at(hi) - q.at(hi);
            if dl * dh < 0.0 {
                crit.push(lo + (hi - lo) * dl / (dl - dh));
            }
        }
    }
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|b, a| (*b - *a).abs() <= TOL);

    let mut out: Vec<Seg> = Vec::new();
    for w in crit.windows(2) {
        let (c, d) = (w[0], w[1]);
        let mid = 0.5 * (c + d);
        let best = segs
            .iter()
            .filter(|s| s.a0 <= mid && s.a1 >= mid)
            .max_by(|x, y| x.at(mid).total_cmp(&y.at(mid)).then(y.slope().total_cmp(&x.slope())));
        if let Some(b) = best {
            out.push(Seg::new(c, d, b.at(c), b.at(d)));
        }
    }
    merge(out)
}

fn merge(segs: Vec<Seg>) -> Vec<Seg> {
    let mut out: Vec<Seg> = Vec::with_capacity(segs.len());
    for mut s in segs {
        if let Some(l) = out.last_mut() {
            let touching = (l.a1 - s.a0).abs() <= TOL;
            if touching && (l.f1 - s.f0).abs() <= TOL {
                s.f0 = l.f1;
                s.a0 = l.a1;
                let sl = l.slope();
                if (sl - s.slope()).abs() <= 1e-9 * (1.0 + sl.abs()) {
                    l.a1 = s.a1;
                    l.f1 = s.f1;
                    continue;
                }
            }
        }
        out.push(s);
    }
    out
}

/// `max_{ξ≤α} g(ξ)` on `[start, extend_to]` for segments sorted by `a0`.
fn prefix_max(segs: &[Seg], extend_to: f64) -> Vec<Seg> {
    let mut out = Vec::new();
    let Some(first) = segs.first() else { return out };
    let mut m = f64::NEG_INFINITY;
    let mut pos = first.a0;
    for s in segs {
        if s.a0 > pos + TOL && m.is_finite() {
            out.push(Seg::new(pos, s.a0, m, m));
        }
        pos = pos.max(s.a0);
        if s.is_point() {
            m = m.max(s.f0);
            continue;
        }
        let slope = s.slope();
        if slope > 0.0 && s.f1 > m {
            if s.f0 >= m {
                out.push(*s);
            } else {
                let c = s.a0 + (m - s.f0) / slope;
                out.push(Seg::new(s.a0, c, m, m));
                out.push(Seg::new(c, s.a1, m, s.f1));
            }
            m = s.f1;
        } else {
            m = m.max(s.f0);
            out.push(Seg::new(s.a0, s.a1, m, m));
        }
        pos = pos.max(s.a1);
    }
    if extend_to > pos + TOL {
        out.push(Seg::new(pos, extend_to, m, m));
    }
    out
}

/// `f_X(ξ) + f_Y(ξ) + ξ` on the common support, with point values at every
/// breakpoint so that jump tops are kept.
fn saddle_integrand(x: &Sfd, y: &Sfd) -> Vec<Seg> {
    let (Some((xl, xh)), Some((yl, yh))) = (x.support(), y.support()) else { return Vec::new() };
    let lo = xl.max(yl);
    let hi = xh.min(yh);
    if hi < lo - TOL {
        return Vec::new();
    }
    let mut crit: Vec<f64> = x
        .breakpoints()
        .into_iter()
        .chain(y.breakpoints())
        .map(|p| p.0)
        .filter(|a| *a >= lo - TOL && *a <= hi + TOL)
        .collect();
    crit.push(lo);
    crit.push(hi);
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|b, a| (*b - *a).abs() <= TOL);
    let mut out = Vec::new();
    for &c in &crit {
        let v = x.value(c) + y.value(c) + c;
        if v.is_finite() {
            out.push(Seg::point(c, v));
        }
    }
    for w in crit.windows(2) {
        let (c, d) = (w[0], w[1]);
        let mid = 0.5 * (c + d);
        let sx = x.segs.iter().find(|s| s.a0 <= mid && s.a1 >= mid && !s.is_point());
        let sy = y.segs.iter().find(|s| s.a0 <= mid && s.a1 >= mid && !s.is_point());
        if let (Some(sx), Some(sy)) = (sx, sy) {
            out.push(Seg::new(c, d, sx.at(c) + sy.at(c) + c, sx.at(d) + sy.at(d) + d));
        }
    }
    out.sort_by(|p, q| p.a0.total_cmp(&q.a0).then(p.a1.total_cmp(&q.a1)));
    out
}

fn restrict_all(f: &Sfd, lo: f64, hi: f64) -> impl Iterator<Item = Seg> + '_ {
    f.segs.iter().filter_map(move |s| s.restrict(lo, hi))
}

/// Lévy SFD: `μα` on `[0, 1/μ]`, then `1/μ + 1 − α` down to zero.
pub fn sfd_levy(mu: f64) -> Result<Sfd> {
    if !(mu > 0.0 && mu < 2.0) {
        bail!(Parameter, "mu={mu} outside (0, 2)");
    }
    let p = 1.0 / mu;
    Sfd::from_breakpoints(&[(0.0, 0.0), (p, 1.0), (p + 1.0, 0.0)])
}

/// SFD of `|X|^n`: `f(α/n)`.
pub fn sfd_power(f: &Sfd, n: f64) -> Result<Sfd> {
    if !(n > 0.0 && n.is_finite()) {
        bail!(Parameter, "power n={n} must be positive");
    }
    let segs = f.segs.iter().map(|s| Seg::new(s.a0 * n, s.a1 * n, s.f0, s.f1)).collect();
    Ok(Sfd { segs })
}

/// SFD of `X + Y` for independent summands with arbitrary relative sign.
///
/// With `α₀(X) ≤ α₀(Y)`: below `α₀(X)` the larger SFD wins; between the two
/// typical values `X` alone or a cancellation contributes; above both only
/// cancellations do, through `max_{ξ≤α}{f_X(ξ)+f_Y(ξ)+ξ} − 1 − α`.
pub fn sfd_sum(fx: &Sfd, fy: &Sfd) -> Sfd {
    if fx.is_empty() {
        return fy.clone();
    }
    if fy.is_empty() {
        return fx.clone();
    }
    let (x, y) = match (fx.typical_alpha(), fy.typical_alpha()) {
        (Some(a), Some(b)) if b < a => (fy, fx),
        _ => (fx, fy),
    };
    let a = x.typical_alpha().unwrap_or(0.0);
    let b = y.typical_alpha().unwrap_or(0.0);

    let mut pieces: Vec<Seg> = Vec::new();
    pieces.extend(restrict_all(x, f64::NEG_INFINITY, a));
    pieces.extend(restrict_all(y, f64::NEG_INFINITY, a));
    if b > a + TOL {
        pieces.extend(restrict_all(x, a, b));
    }
    let g = saddle_integrand(x, y);
    if !g.is_empty() {
        let gmax = g.iter().map(|s| s.f0.max(s.f1)).fold(f64::NEG_INFINITY, f64::max);
        let end = g.iter().map(|s| s.a1).fold(a, f64::max).max(gmax - 1.0) + 1.0;
        for s in prefix_max(&g, end) {
            let t = Seg::new(s.a0, s.a1, s.f0 - 1.0 - s.a0, s.f1 - 1.0 - s.a1);
            if let Some(t) = t.restrict(a, f64::INFINITY) {
                pieces.push(t);
            }
        }
    }
    Sfd::from_segs(pieces).clipped()
}

/// SFD of `X / Y`: `max_η{f_X(α+η) + f_Y(η)} − 1`, as an exact max-plus
/// convolution of `f_X` with the reflection of `f_Y`.
pub fn sfd_ratio(fx: &Sfd, fy: &Sfd) -> Sfd {
    let mut pieces = Vec::new();
    for sx in &fx.segs {
        for sy in &fy.segs {
            // Reflected piece t = −η on [−y1, −y0], starting from f_Y(y1).
            let start = (sx.a0 - sy.a1, sx.f0 + sy.f1 - 1.0);
            let (la, sa) = (sx.a1 - sx.a0, sx.slope());
            let (lb, sb) = (sy.a1 - sy.a0, -sy.slope());
            let order = if sa >= sb { [(la, sa), (lb, sb)] } else { [(lb, sb), (la, sa)] };
            let mut p = start;
            let mut any = false;
            for (len, sl) in order {
                if len > TOL {
                    let q = (p.0 + len, p.1 + sl * len);
                    pieces.push(Seg::new(p.0, q.0, p.1, q.1));
                    p = q;
                    any = true;
                }
            }
            if !any {
                pieces.push(Seg::point(start.0, start.1));
            }
        }
    }
    Sfd::from_segs(pieces).clipped()
}

/// SFD of a sum of `𝒩^β` positive draws: `f + β` up to where it first reaches 1.
pub fn sfd_extensive_sum(f: &Sfd, beta: f64) -> Result<Sfd> {
    if !(0.0..=1.0).contains(&beta) {
        bail!(Parameter, "beta={beta} outside [0, 1]");
    }
    let mut out = Vec::new();
    for s in &f.segs {
        let (f0, f1) = (s.f0 + beta, s.f1 + beta);
        if f0 > 1.0 + TOL {
            break;
        }
        if f0 >= 1.0 - TOL && (f1 > f0 || s.is_point()) {
            out.push(Seg::point(s.a0, 1.0));
            break;
        }
        if f1 <= 1.0 + TOL {
            out.push(Seg::new(s.a0, s.a1, f0, f1.min(1.0)));
            if f1 >= 1.0 - TOL {
                break;
            }
            continue;
        }
        let c = s.a0 + (1.0 - f0) / (f1 - f0) * (s.a1 - s.a0);
        out.push(Seg::new(s.a0, c, f0, 1.0));
        break;
    }
    Ok(Sfd::from_segs(out).clipped())
}

/// Intermediate SFDs of the eigenvalue-spacing pipeline around a dominant term.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpacingStages {
    /// Single coupling, `f_L`.
    pub levy: Sfd,
    /// Signed sum of `𝒩^r` couplings on the diagonal.
    pub diagonal: Sfd,
    /// `|j|²`, `f_{L²}`.
    pub squared: Sfd,
    /// `|j|²/e` with `e` a first-order energy difference, `f_R`.
    pub ratio: Sfd,
    /// Diagonal plus same-sector second order, `f_{LR}`.
    pub same_sector: Sfd,
    /// Extensive cross-sector sum of `𝒩^b` squares, `f_S`.
    pub cross_sector: Sfd,
    /// Perturbative eigenvalue, `f_E`.
    pub eigenvalue: Sfd,
    /// Difference of two eigenvalues, `f_Δ`.
    pub spacing: Sfd,
}

pub fn level_spacing_stages(mu: f64, a: f64, b: f64, r: f64) -> Result<LevelSpacingStages> {
    for (name, v) in [("a", a), ("b", b)] {
        if !(v > 0.0 && v < 1.0) {
            bail!(Parameter, "exponent {name}={v} outside (0, 1)");
        }
    }
    if !(r > 0.0 && r.is_finite()) {
        bail!(Parameter, "exponent r={r} must be positive");
    }
    let levy = sfd_levy(mu)?;
    let diagonal = sfd_sum(&levy, &levy);
    let squared = sfd_power(&levy, 2.0)?;
    let ratio = sfd_ratio(&squared, &levy);
    // The N^a same-sector terms are summed with arbitrary signs; like a signed
    // Lévy sum this keeps f_R, so `a` (like `r`) does not move the result.
    let same_sector = sfd_sum(&diagonal, &ratio);
    let cross_sector = sfd_extensive_sum(&squared, b)?;
    let eigenvalue = sfd_sum(&cross_sector, &same_sector);
    let spacing = sfd_sum(&eigenvalue, &eigenvalue);
    Ok(LevelSpacingStages { levy, diagonal, squared, ratio, same_sector, cross_sector, eigenvalue, spacing })
}

/// `f_Δ`: SFD of the spacing between perturbative eigenvalues.
pub fn sfd_level_spacing(mu: f64, a: f64, b: f64, r: f64) -> Result<Sfd> {
    Ok(level_spacing_stages(mu, a, b, r)?.spacing)
}

/// Empirical SFD of samples after normalizing by the largest magnitude.
pub fn sfd_empirical(samples: &[f64], n_bins: usize) -> Result<Sfd> {
    let m = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(m > 0.0) || !m.is_finite() {
        bail!(Degenerate, "samples are all zero or not finite");
    }
    let scaled: Vec<f64> = samples.iter().map(|x| x / m).collect();
    sfd_empirical_normalized(&scaled, n_bins)
}

/// Empirical SFD of samples already expressed in units of the largest scale.
///
/// `α = −ln|x| / ln 𝒩` with `𝒩` the sample count, histogrammed on `[0, α_max]`;
/// each occupied bin gives `f̂ = 1 + ln(count / (𝒩·Δα·ln 𝒩)) / ln 𝒩`. The
/// outer 2% of bins on each side are dropped. Magnitudes above one and exact
/// zeros fall outside the normalized domain and are not binned.
pub fn sfd_empirical_normalized(samples: &[f64], n_bins: usize) -> Result<Sfd> {
    let n = samples.len();
    if n < 2 {
        bail!(InsufficientData, "need at least two samples, got {n}");
    }
    if n_bins == 0 {
        bail!(Parameter, "n_bins must be positive");
    }
    let ln_n = (n as f64).ln();
    let alphas: Vec<f64> = samples
        .iter()
        .filter(|x| **x != 0.0 && x.is_finite())
        .map(|x| -x.abs().ln() / ln_n)
        .filter(|a| *a >= -TOL)
        .map(|a| a.max(0.0))
        .collect();
    if alphas.is_empty() {
        bail!(Degenerate, "no sample lies in the normalized domain");
    }
    let hi = alphas.iter().copied().fold(0.0, f64::max);
    if hi <= TOL {
        return Ok(Sfd::point_mass(0.0, 1.0));
    }
    let w = hi / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for a in &alphas {
        let k = ((a / w) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    let trim = (0.02 * n_bins as f64).ceil() as usize;
    let pts: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(k, c)| **c > 0 && *k >= trim && *k + trim < n_bins)
        .map(|(k, &c)| ((k as f64 + 0.5) * w, 1.0 + (c as f64 / (n as f64 * w * ln_n)).ln() / ln_n))
        .collect();
    if pts.is_empty() {
        bail!(InsufficientData, "every occupied bin was trimmed");
    }
    Sfd::from_breakpoints(&pts)
}

/// Largest `μ` for which the dominant coupling still splits the spectrum:
/// `ln N / ((qc + q)·N·ln 2)`.
pub fn crossover_bound(n: usize, q: usize, c: f64) -> Result<f64> {
    if q < 2 || n < q {
        bail!(Parameter, "need N >= q >= 2, got N={n}, q={q}");
    }
    if !(0.0..1.0).contains(&c) {
        bail!(Parameter, "c={c} outside [0, 1)");
    }
    let (n, q) = (n as f64, q as f64);
    Ok(n.ln() / ((q * c + q) * n * core::f64::consts::LN_2))
}
