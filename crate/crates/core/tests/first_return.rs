//! The sampler and the adaptive mass routine are checked against a plain
//! Simpson quadrature of the closed-form density on a log-spaced `r` grid.

use grazesim::analysis::stats::{ks_one_sample, mean_cov};
use grazesim::noise::{first_return_mass, first_return_pdf, FirstReturnSampler};
use grazesim::rng;

/// Composite Simpson weights for `n` (odd) equally spaced nodes.
fn simpson_weights(n: usize, step: f64) -> Vec<f64> {
    assert!(n % 2 == 1);
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * step / 3.0
        })
        .collect()
}

/// Upper end of the `h` range at fixed `r`, far beyond the conditional mode.
fn h_top(r: f64, rho: f64) -> f64 {
    (r + 2.0) / 4.0 + 16.0 * (rho * r).sqrt() / 2.0
}

/// Marginal density of `r` on a log grid, by Simpson in `h`.
fn r_marginal(rho: f64, r_lo: f64, r_hi: f64, n_r: usize, n_h: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let (s0, s1) = (r_lo.ln(), r_hi.ln());
    let ds = (s1 - s0) / (n_r - 1) as f64;
    let rs: Vec<f64> = (0..n_r).map(|i| (s0 + i as f64 * ds).exp()).collect();
    let fr = rs
        .iter()
        .map(|&r| {
            let top = h_top(r, rho);
            let dh = top / (n_h - 1) as f64;
            simpson_weights(n_h, dh)
                .iter()
                .enumerate()
                .map(|(j, w)| w * first_return_pdf(r, j as f64 * dh, rho).unwrap())
                .sum::<f64>()
        })
        .collect();
    (rs, fr, ds)
}

fn simpson_mass(rho: f64) -> f64 {
    let (rs, fr, ds) = r_marginal(rho, 1e-3, 2e3, 6001, 1201);
    simpson_weights(rs.len(), ds)
        .iter()
        .zip(rs.iter().zip(&fr))
        .map(|(w, (r, f))| w * r * f)
        .sum()
}

#[test]
fn simpson_oracle_mass_is_one() {
    for rho in [0.008, 0.03, 0.1] {
        let m = simpson_mass(rho);
        assert!((m - 1.0).abs() < 1e-3, "rho = {rho}: mass {m}");
    }
}

#[test]
fn adaptive_mass_matches_oracle() {
    for rho in [0.005, 0.008, 0.03, 0.1, 0.5] {
        let (mass, r_max) = first_return_mass(rho).unwrap();
        assert!(
            (mass - 1.0).abs() < 1e-3,
            "rho = {rho}: mass {mass} up to r = {r_max}"
        );
    }
    for rho in [0.008, 0.1] {
        let (mass, _) = first_return_mass(rho).unwrap();
        assert!((mass - simpson_mass(rho)).abs() < 2e-4);
    }
}

/// Cumulative distribution of `r` by trapezoid accumulation of the marginal.
fn r_cdf(rho: f64) -> impl Fn(f64) -> f64 {
    let (rs, fr, ds) = r_marginal(rho, 1e-3, 2e3, 20001, 801);
    let mut cdf = vec![0.0; rs.len()];
    for i in 1..rs.len() {
        cdf[i] = cdf[i - 1] + 0.5 * ds * (rs[i] * fr[i] + rs[i - 1] * fr[i - 1]);
    }
    let total = *cdf.last().unwrap();
    move |r: f64| {
        if r <= rs[0] {
            return 0.0;
        }
        let k = rs.partition_point(|&x| x < r).min(rs.len() - 1);
        let t = (r.ln() - rs[k - 1].ln()) / ds;
        (cdf[k - 1] + t * (cdf[k] - cdf[k - 1])) / total
    }
}

#[test]
fn sampled_r_marginal_matches_quadrature() {
    for (rho, seed) in [(0.008, 1), (0.03, 2), (0.3, 3)] {
        let sampler = FirstReturnSampler::new(rho).unwrap();
        let mut rng = rng::stream(seed, 0);
        let rs: Vec<f64> = (0..100_000).map(|_| sampler.sample(&mut rng).r).collect();
        let (d, p) = ks_one_sample(&rs, r_cdf(rho));
        assert!(p > 0.01, "rho = {rho}: D = {d}, p = {p}");
    }
}

/// `P(h ≤ h0)` by nested Simpson, the inner integral truncated at `h0`.
fn h_cdf(rho: f64, h0: f64) -> f64 {
    let (s0, s1) = (1e-3f64.ln(), 2e3f64.ln());
    let n_r = 6001;
    let ds = (s1 - s0) / (n_r - 1) as f64;
    let n_h = 801;
    simpson_weights(n_r, ds)
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let r = (s0 + i as f64 * ds).exp();
            let top = h_top(r, rho).min(h0);
            let dh = top / (n_h - 1) as f64;
            let inner: f64 = simpson_weights(n_h, dh)
                .iter()
                .enumerate()
                .map(|(j, wh)| wh * first_return_pdf(r, j as f64 * dh, rho).unwrap())
                .sum();
            w * r * inner
        })
        .sum()
}

#[test]
fn sampled_h_marginal_matches_quadrature() {
    let rho = 0.03;
    let n = 100_000;
    let sampler = FirstReturnSampler::new(rho).unwrap();
    let mut rng = rng::stream(4, 0);
    let hs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng).h).collect();
    for h0 in [0.7, 0.85, 0.95, 1.0, 1.05, 1.15, 1.3] {
        let p = h_cdf(rho, h0);
        let emp = hs.iter().filter(|&&h| h <= h0).count() as f64 / n as f64;
        let se = (p * (1.0 - p) / n as f64).sqrt();
        assert!((emp - p).abs() < 4.0 * se + 1e-4, "h0 = {h0}: {emp} vs {p}");
    }
}

#[test]
fn moments_near_gaussian_regime() {
    let rho = 0.008;
    let sampler = FirstReturnSampler::new(rho).unwrap();
    let mut rng = rng::stream(5, 0);
    let pts: Vec<(f64, f64)> = (0..100_000)
        .map(|_| {
            let s = sampler.sample(&mut rng);
            (s.r, s.h)
        })
        .collect();
    let (m, c) = mean_cov(&pts);
    assert!((m.0 - 2.0).abs() < 0.02 && (m.1 - 1.0).abs() < 0.01);
    let k = 2.0 * rho / 3.0;
    let want = [[4.0 * k, k], [k, k]];
    for i in 0..2 {
        for j in 0..2 {
            assert!(
                (c[i][j] / want[i][j] - 1.0).abs() < 0.05,
                "cov[{i}][{j}] = {}",
                c[i][j]
            );
        }
    }
}

#[test]
fn heavy_r_tail_at_large_rho() {
    // a Gaussian with the small-noise covariance puts ~1e-9 beyond six
    // standard deviations; the true law has far more
    let rho = 0.5;
    let sampler = FirstReturnSampler::new(rho).unwrap();
    let mut rng = rng::stream(6, 0);
    let cut = 2.0 + 6.0 * (8.0 * rho / 3.0f64).sqrt();
    let n = 100_000;
    let beyond = (0..n).filter(|_| sampler.sample(&mut rng).r > cut).count();
    let want = 1.0 - r_cdf(rho)(cut);
    assert!(beyond as f64 / n as f64 > 1e-3);
    assert!(((beyond as f64 / n as f64) - want).abs() < 5.0 * (want / n as f64).sqrt());
}
