//! Fixed-size 2×2 linear algebra.

use std::ops::{Add, Mul, Sub};

/// Row-major 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[row][col]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        let m = self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1],
            m[1][0] * v[0] + m[1][1] * v[1],
        ]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    /// Spectral radius from the characteristic polynomial.
    pub fn spectral_radius(&self) -> f64 {
        let half_tr = 0.5 * self.trace();
        let disc = half_tr * half_tr - self.det();
        if disc >= 0.0 {
            let s = disc.sqrt();
            (half_tr + s).abs().max((half_tr - s).abs())
        } else {
            // complex pair: |lambda|^2 = det
            self.det().sqrt()
        }
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (self.0, rhs.0);
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }
}

/// Threshold on the eigenvalue discriminant below which the matrix is
/// treated as defective (repeated eigenvalue).
pub const DEFECTIVE_DISCRIMINANT: f64 = 1e-9;

/// Matrix exponential by the closed-form eigen decomposition.
///
/// Writing `M = sI + N` with `s = tr(M)/2`, the traceless part satisfies
/// `N² = ΔI` with `Δ = s² − det(M)`, so
/// `exp(M) = e^s (C(Δ) I + S(Δ) N)` where `(C, S)` is `(cosh, sinh/·)` for
/// real distinct eigenvalues, `(cos, sin/·)` for a complex pair, and a
/// truncated series in the defective case.
pub fn expm_closed_form(m: &Mat2) -> Mat2 {
    let s = 0.5 * m.trace();
    let n = *m - Mat2::IDENTITY.scale(s);
    // Δ = s² − det(M) = −det(N)
    let delta = -n.det();
    let (c, sinc) = if delta.abs() < DEFECTIVE_DISCRIMINANT {
        // cosh(√Δ) and sinh(√Δ)/√Δ as power series in Δ
        let c = 1.0 + delta / 2.0 + delta * delta / 24.0 + delta.powi(3) / 720.0;
        let sinc = 1.0 + delta / 6.0 + delta * delta / 120.0 + delta.powi(3) / 5040.0;
        (c, sinc)
    } else if delta > 0.0 {
        let q = delta.sqrt();
        (q.cosh(), q.sinh() / q)
    } else {
        let q = (-delta).sqrt();
        (q.cos(), q.sin() / q)
    };
    (Mat2::IDENTITY.scale(c) + n.scale(sinc)).scale(s.exp())
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm_series(m: &Mat2) -> Mat2 {
    let norm = m.max_abs() * 2.0;
    let mut squarings = 0;
    let mut scaled = *m;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
        scaled = m.scale(0.5_f64.powi(squarings as i32));
    }
    let mut term = Mat2::IDENTITY;
    let mut sum = Mat2::IDENTITY;
    for k in 1..=30 {
        term = (term * scaled).scale(1.0 / k as f64);
        sum = sum + term;
        if term.max_abs() < 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
