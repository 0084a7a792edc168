//! First return of integrated Brownian motion with drift.
//!
//! In scaled variables `dp = q ds`, `dq = −ds + √ρ dW` with `(p, q)(0) = (0, 1)`,
//! the process returns to `p = 0` at time `r` with velocity `q = −h`. The
//! joint density of `(r, h)` is
//!
//! ```text
//! F(r, h; ρ) = √3 h / (π ρ r²) · exp(−Q / (2ρr)) · erf(√(6h / (ρr))),
//! Q = (r−2)² − 2(r−2)(h−1) + 4(h−1)².
//! ```
//!
//! Completing the square in `h` gives `Q = 4(h − m)² + ¾(r−2)²` with
//! `m = (r+2)/4`. The sampler below uses this split: the `r` marginal of the
//! density with `erf` replaced by one is an inverse-Gaussian kernel
//! `IG(2, 3/ρ)` times `(r+2)·G(a(r))`, and conditional on `r` the `h` law is a
//! Gaussian weighted by `h`. Both pieces are drawn exactly and the bounded
//! remainders are removed by rejection, so the sampler is exact for every
//! `ρ > 0` and cheap enough to rebuild on every map iterate.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::quadrature;
use crate::special::{erf, normal_cdf, normal_pdf};

/// A scaled return time `r` and return speed `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstReturnSample {
    pub r: f64,
    pub h: f64,
}

impl FirstReturnSample {
    /// The noise-free return: `r = 2`, `h = 1`.
    pub const DETERMINISTIC: FirstReturnSample = FirstReturnSample { r: 2.0, h: 1.0 };

    pub fn new(r: f64, h: f64) -> Result<Self> {
        if r > 0.0 && h > 0.0 && r.is_finite() && h.is_finite() {
            Ok(Self { r, h })
        } else {
            Err(Error::InvalidSample { r, h })
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "rho must be finite and > 0, got {rho}"
        )))
    }
}

/// Joint density `F(r, h; ρ)`; zero outside the open positive quadrant.
pub fn first_return_pdf(r: f64, h: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(pdf_unchecked(r, h, rho))
}

#[inline]
fn pdf_unchecked(r: f64, h: f64, rho: f64) -> f64 {
    if !(r > 0.0 && h > 0.0) {
        return 0.0;
    }
    let dr = r - 2.0;
    let dh = h - 1.0;
    let quad = dr * dr - 2.0 * dr * dh + 4.0 * dh * dh;
    let rr = rho * r;
    3f64.sqrt() * h / (PI * rho * r * r) * (-quad / (2.0 * rr)).exp() * erf((6.0 * h / rr).sqrt())
}

/// Covariance `(2ρ/3)·[[4, 1], [1, 1]]` of the small-ρ Gaussian approximation,
/// ordered `(r, h)`.
pub fn first_return_cov_gauss(rho: f64) -> Result<Mat2> {
    check_rho(rho)?;
    Ok(Mat2::new(4.0, 1.0, 1.0, 1.0).scale(2.0 * rho / 3.0))
}

/// Mass of the density over a box chosen by doubling `r_max` until the
/// increment from the next doubling falls below `1e-9`. Returns
/// `(mass, r_max)`; in `h` each slice is integrated over `m ± 14s`.
pub fn first_return_mass(rho: f64) -> Result<(f64, f64)> {
    check_rho(rho)?;
    let sd_r = (8.0 * rho / 3.0).sqrt();
    let mut r_max = 2.0 + 12.0 * sd_r;
    let mut mass = mass_on(rho, 0.0, r_max);
    for _ in 0..40 {
        let extra = mass_on(rho, r_max, 2.0 * r_max);
        mass += extra;
        r_max *= 2.0;
        if extra < 1e-9 {
            return Ok((mass, r_max));
        }
    }
    Err(Error::SamplerSetup(format!(
        "first-return mass did not converge for rho = {rho}"
    )))
}

/// Integral of `F` over `r ∈ [r_lo, r_hi]`, `h > 0`.
pub(crate) fn mass_on(rho: f64, r_lo: f64, r_hi: f64) -> f64 {
    let sd_r = (8.0 * rho / 3.0).sqrt();
    let mut breaks = vec![r_lo];
    for j in -8..=8 {
        let b = 2.0 + f64::from(j) * sd_r;
        if b > r_lo && b < r_hi {
            breaks.push(b);
        }
    }
    breaks.push(r_hi);
    breaks
        .windows(2)
        .map(|w| quadrature::integrate(|r| h_slice(rho, r), w[0], w[1], 1e-12))
        .sum()
}

/// `∫ F(r, h) dh` at fixed `r`.
fn h_slice(rho: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let m = (r + 2.0) / 4.0;
    let s = (rho * r).sqrt() / 2.0;
    let lo = (m - 14.0 * s).max(0.0);
    let hi = m + 14.0 * s;
    let mid = [lo, (m - 3.0 * s).max(lo), m.max(lo), m + 3.0 * s, hi];
    mid.windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| quadrature::integrate(|h| pdf_unchecked(r, h, rho), w[0], w[1], 1e-14))
        .sum()
}

/// `Φ(a) + φ(a)/a`, the ratio between the `h`-integral of the `h`-weighted
/// Gaussian and its leading term. Decreasing in `a > 0`.
#[inline]
fn tail_factor(a: f64) -> f64 {
    normal_cdf(a) + normal_pdf(a) / a
}

/// Exact sampler for `F(·, ·; ρ)` at a fixed `ρ`. Construction is O(1).
#[derive(Debug, Clone, Copy)]
pub struct FirstReturnSampler {
    rho: f64,
    /// Shape of the inverse-Gaussian kernel, `3/ρ`; its mean is 2.
    lambda: f64,
    /// Bound on `tail_factor` over `r > 0`, attained at `r = 2`.
    tail_max: f64,
}

impl FirstReturnSampler {
    pub fn new(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        let a_min = (2.0 / rho).sqrt();
        let tail_max = tail_factor(a_min);
        if !tail_max.is_finite() {
            return Err(Error::SamplerSetup(format!(
                "envelope bound is not finite for rho = {rho}"
            )));
        }
        Ok(Self {
            rho,
            lambda: 3.0 / rho,
            tail_max,
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Inverse Gaussian with mean 2 and shape λ (Michael–Schucany–Haas, with
    /// the root written in a cancellation-free form).
    fn inverse_gaussian<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mean = 2.0;
        let z: f64 = rng.sample(StandardNormal);
        let t = mean * z * z / (2.0 * self.lambda);
        let x = mean / (1.0 + t + (t * (2.0 + t)).sqrt());
        let u: f64 = rng.random();
        if u * (mean + x) <= mean {
            x
        } else {
            mean * mean / x
        }
    }

    /// Draw `r` from the mixture `½ IG + ½ size-biased IG`, whose density is
    /// proportional to `(r + 2)·IG(r)`. The size-biased inverse Gaussian is
    /// the inverse Gaussian plus an independent `(4/λ)·χ²₁`.
    fn proposal_r<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let base = self.inverse_gaussian(rng);
        if rng.random::<bool>() {
            let z: f64 = rng.sample(StandardNormal);
            base + 4.0 * z * z / self.lambda
        } else {
            base
        }
    }

    /// Draw `y > 0` with density proportional to `y·exp(−(y−a)²/2)`.
    fn weighted_gaussian<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
        // Envelope: a·N(a,1) on y > 0 plus a Rayleigh tail shifted to start at a.
        let w_gauss = a * (2.0 * PI).sqrt() * normal_cdf(a);
        let p_gauss = w_gauss / (w_gauss + 1.0);
        loop {
            if rng.random::<f64>() < p_gauss {
                let y = loop {
                    let z: f64 = rng.sample(StandardNormal);
                    if a + z > 0.0 {
                        break a + z;
                    }
                };
                if y >= a || rng.random::<f64>() * a < y {
                    return y;
                }
            } else {
                let u: f64 = rng.random();
                // 1 - u lies in (0, 1]
                return a + (-2.0 * (1.0 - u).ln()).sqrt();
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FirstReturnSample {
        loop {
            let r = self.proposal_r(rng);
            if !(r > 0.0 && r.is_finite()) {
                continue;
            }
            let a = (r + 2.0) / (2.0 * (self.rho * r).sqrt());
            if rng.random::<f64>() * self.tail_max > tail_factor(a) {
                continue;
            }
            let s = (self.rho * r).sqrt() / 2.0;
            let h = s * Self::weighted_gaussian(a, rng);
            if !(h > 0.0) {
                continue;
            }
            if rng.random::<f64>() <= erf((6.0 * h / (self.rho * r)).sqrt()) {
                return FirstReturnSample { r, h };
            }
        }
    }
}

/// One draw from `F(·, ·; ρ)`.
pub fn sample_first_return<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> Result<FirstReturnSample> {
    Ok(FirstReturnSampler::new(rho)?.sample(rng))
}
