use levy_syk::stable::*;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

const MILLION: usize = 1_000_000;

fn draws(mu: f64, sigma: f64, n: usize, seed: u64) -> Vec<f64> {
    let p = StableParams::new(mu, sigma).unwrap();
    p.sample_n(n, &mut rng_from_seed(seed))
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    sorted[((sorted.len() - 1) as f64 * p).round() as usize]
}

#[test]
fn gaussian_limit_variance() {
    let x = draws(2.0, core::f64::consts::FRAC_1_SQRT_2, MILLION, 1);
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / x.len() as f64;
    assert!((v - 1.0).abs() < 0.02, "variance {v}");
}

#[test]
fn cauchy_quartiles() {
    let mut x = draws(1.0, 1.0, MILLION, 2);
    x.sort_by(f64::total_cmp);
    let med = quantile(&x, 0.5);
    let iqr = quantile(&x, 0.75) - quantile(&x, 0.25);
    assert!(med.abs() < 0.01, "median {med}");
    assert!((iqr - 2.0).abs() < 0.06, "iqr {iqr}");
}

#[test]
fn hill_tail_indices() {
    for (mu, lo, hi) in [(0.5, 0.45, 0.55), (1.0, 0.93, 1.07), (1.5, 1.38, 1.62)] {
        let x = draws(mu, 1.0, MILLION, 3);
        let est = tail_index_estimate(&x, 10_000).unwrap();
        assert!(est > lo && est < hi, "mu={mu}: Hill {est}");
    }
    assert!(tail_index_estimate(&[1.0; 100], 10).is_err());
    assert!(tail_index_estimate(&[1.0, 2.0], 0).is_err());
    assert!(tail_index_estimate(&[1.0, 2.0], 2).is_err());
}

#[test]
fn tail_law_slope() {
    for mu in [0.5, 1.0, 1.5] {
        let mut x: Vec<f64> = draws(mu, 1.0, MILLION, 4).into_iter().map(f64::abs).collect();
        x.sort_by(|a, b| b.total_cmp(a));
        // survival fraction at the 1e-2 ... 1e-4 upper quantiles
        let ranks = [10_000usize, 3_000, 1_000, 300, 100];
        let lx: Vec<f64> = ranks.iter().map(|&k| x[k].ln()).collect();
        let ly: Vec<f64> = ranks.iter().map(|&k| (k as f64 / x.len() as f64).ln()).collect();
        let (mx, my) = (lx.iter().sum::<f64>() / 5.0, ly.iter().sum::<f64>() / 5.0);
        let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
            / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
        assert!((-slope - mu).abs() < 0.1 * mu, "mu={mu}: slope {slope}");
    }
}

#[test]
fn gaussian_ks_distance() {
    let sigma = 0.8;
    let mut x = draws(2.0, sigma, 100_000, 5);
    x.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, (2.0f64).sqrt() * sigma).unwrap();
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = normal.cdf(v);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 0.01, "KS distance {d}");
}

#[test]
fn sign_symmetry() {
    let n = 200_000;
    for mu in [0.3, 0.5, 1.0, 1.5, 2.0] {
        let x = draws(mu, 1.0, n, 6);
        let s: f64 = x.iter().map(|v| v.signum()).sum::<f64>() / n as f64;
        assert!(s.abs() < 3.0 / (n as f64).sqrt(), "mu={mu}: mean sign {s}");
    }
}

#[test]
fn coupling_tensor_examples() {
    let t = sample_couplings(8, 4, 1.0, 2.0, 0).unwrap();
    assert_eq!(t.len(), 70);
    let want = 2.0 * 6.0 / 512.0;
    let mut acc = 0.0;
    for seed in 0..100 {
        let t = sample_couplings(8, 4, 1.0, 2.0, realization_seed(11, seed)).unwrap();
        acc += t.values.iter().map(|v| v * v).sum::<f64>() / 70.0;
    }
    let m2 = acc / 100.0;
    assert!((m2 - want).abs() < 0.3 * want, "second moment {m2} vs {want}");
    assert_eq!(sample_couplings(4, 4, 1.0, 1.5, 9).unwrap().len(), 1);
    let a = sample_couplings(12, 4, 1.0, 0.7, 77).unwrap();
    let b = sample_couplings(12, 4, 1.0, 0.7, 77).unwrap();
    assert_eq!(a.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    assert!(sample_couplings(7, 4, 1.0, 1.0, 0).is_err());
    assert!(sample_couplings(8, 3, 1.0, 1.0, 0).is_err());
    assert!(sample_couplings(8, 10, 1.0, 1.0, 0).is_err());
    assert!(sample_couplings(8, 4, 1.0, 2.5, 0).is_err());
    assert!(sample_couplings(8, 4, 0.0, 1.0, 0).is_err());
}

#[test]
fn json_round_trip_is_bit_exact() {
    let t = sample_couplings(10, 4, 1.0, 0.9, 5).unwrap();
    let s = serde_json::to_string(&t).unwrap();
    assert!(s.starts_with("{\"N\":10,\"q\":4,\"J\":1.0,\"mu\":0.9,\"seed\":5,\"values\":["));
    let back: CouplingTensor = serde_json::from_str(&s).unwrap();
    assert_eq!(back, t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn draws_scale_with_sigma(mu in 0.1f64..=2.0, sigma in 0.01f64..100.0, seed in any::<u64>()) {
        let unit = draws(mu, 1.0, 50, seed);
        let scaled = draws(mu, sigma, 50, seed);
        for (u, s) in unit.iter().zip(&scaled) {
            prop_assert!((s - sigma * u).abs() <= 1e-12 * s.abs().max(1e-300));
        }
    }

    #[test]
    fn realization_seeds_differ(base in any::<u64>(), i in 0u64..1000, j in 0u64..1000) {
        prop_assume!(i != j);
        prop_assert_ne!(realization_seed(base, i), realization_seed(base, j));
    }
}
