//! Sample moments and Kolmogorov–Smirnov tests.

/// Mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Mean vector and unbiased covariance matrix of 2D samples.
pub fn mean_cov(points: &[(f64, f64)]) -> ((f64, f64), [[f64; 2]; 2]) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut c = [[0.0; 2]; 2];
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        c[0][0] += dx * dx;
        c[0][1] += dx * dy;
        c[1][1] += dy * dy;
    }
    c[0][0] /= n - 1.0;
    c[0][1] /= n - 1.0;
    c[1][1] /= n - 1.0;
    c[1][0] = c[0][1];
    ((mx, my), c)
}

/// Survival function of the Kolmogorov distribution, `P(K > λ)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = f64::from(k);
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as i64 % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with the usual finite-size correction.
fn ks_pvalue(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

/// One-sample test of `xs` against the continuous CDF `cdf`. Returns the
/// statistic and p-value.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &[f64], cdf: F) -> (f64, f64) {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    (d, ks_pvalue(d, n))
}

/// Two-sample test. Returns the statistic and p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    (d, ks_pvalue(d, na * nb / (na + nb)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::special::normal_cdf;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn kolmogorov_reference_values() {
        // classical critical values: P(K > 1.358) = 0.05, P(K > 1.628) = 0.01
        assert!((kolmogorov_sf(1.358_1) - 0.05).abs() < 2e-4);
        assert!((kolmogorov_sf(1.627_6) - 0.01).abs() < 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn normal_sample_passes_one_sample_test() {
        let mut r = rng::stream(4, 0);
        let xs: Vec<f64> = (0..5000).map(|_| r.sample(StandardNormal)).collect();
        let (_, p) = ks_one_sample(&xs, normal_cdf);
        assert!(p > 0.01);
        let (_, p) = ks_one_sample(&xs, |x| normal_cdf(x - 0.2));
        assert!(p < 1e-6);
    }

    #[test]
    fn two_sample_test() {
        let mut r = rng::stream(5, 0);
        let a: Vec<f64> = (0..3000).map(|_| r.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..2000).map(|_| r.sample(StandardNormal)).collect();
        assert!(ks_two_sample(&a, &b).1 > 0.01);
        let c: Vec<f64> = b.iter().map(|x| 1.3 * x).collect();
        assert!(ks_two_sample(&a, &c).1 < 1e-3);
        assert_eq!(ks_two_sample(&a, &a).0, 0.0);
    }

    #[test]
    fn moments() {
        let (m, v) = mean_var(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
        let (c, cov) = mean_cov(&[(0.0, 0.0), (1.0, 2.0), (2.0, 4.0)]);
        assert_eq!(c, (1.0, 2.0));
        assert_eq!(cov, [[1.0, 2.0], [2.0, 4.0]]);
    }
}
