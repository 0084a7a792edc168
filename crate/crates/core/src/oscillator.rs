//! Harmonically forced oscillator with compliant impacts against a
//! prestressed support, and its reduction to normal-form parameters.
//!
//! ```text
//! u'' = −k_osc(u+1) − b_osc u' + F cos t                              u < 0
//! u'' = −k_osc(u+1) − (b_osc+b_supp) u' − k_supp(u+d) + F cos t       u > 0
//! ```
//!
//! In coordinates `v = u'`, `w = (t mod 2π) − t_graz`, `η = F − F_graz` the
//! non-impacting periodic orbit grazes `u = 0` at the origin when `η = 0`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::linalg::{expm_closed_form, expm_series, Mat2};
use crate::map::{NordmarkParams, StochasticMapCoeffs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub k_osc: f64,
    pub b_osc: f64,
    pub k_supp: f64,
    pub b_supp: f64,
    /// Prestress distance of the support.
    pub d: f64,
    /// Forcing amplitude.
    pub forcing: f64,
}

impl OscillatorParams {
    /// Parameters used throughout the reference study: `(4.5, 0.3, 10, 0, 0.1)`
    /// with the forcing set to its grazing value.
    pub fn reference() -> Self {
        let mut p = Self {
            k_osc: 4.5,
            b_osc: 0.3,
            k_supp: 10.0,
            b_supp: 0.0,
            d: 0.1,
            forcing: 0.0,
        };
        p.forcing = p.grazing_forcing();
        p
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.k_osc,
            self.b_osc,
            self.k_supp,
            self.b_supp,
            self.d,
            self.forcing,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::DegenerateParameters(
                "oscillator parameters must be finite".into(),
            ));
        }
        if !(self.k_osc > 0.0 && self.b_osc > 0.0) {
            return Err(Error::DegenerateParameters(
                "k_osc and b_osc must be positive".into(),
            ));
        }
        if !(self.d > 0.0) {
            return Err(Error::DegenerateParameters("d must be positive".into()));
        }
        if self.k_supp < 0.0 || self.b_supp < 0.0 {
            return Err(Error::DegenerateParameters(
                "k_supp and b_supp must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn with_forcing(mut self, forcing: f64) -> Self {
        self.forcing = forcing;
        self
    }

    /// Forcing amplitude at which the steady state has unit amplitude.
    pub fn grazing_forcing(&self) -> f64 {
        grazing_forcing(self)
    }

    pub fn eta(&self) -> f64 {
        self.forcing - self.grazing_forcing()
    }
}

/// Leading-order coefficients of the two vector fields at the grazing point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoeffs {
    pub alpha_l: f64,
    pub beta_l: f64,
    pub gamma_l: f64,
    pub alpha_r: f64,
    pub beta_r: f64,
    pub gamma_r: f64,
}

/// `A` and `b` of the global map `G(u, w; η) ≈ A (u, w)ᵀ + b η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalLinearization {
    pub a: Mat2,
    pub b: [f64; 2],
}

pub fn grazing_forcing(p: &OscillatorParams) -> f64 {
    (p.k_osc - 1.0).hypot(p.b_osc)
}

/// Phase in `(0, π)` at which the grazing steady state touches `u = 0`.
pub fn grazing_phase(p: &OscillatorParams) -> f64 {
    // atan2 picks the (0, π) branch for b_osc > 0 and gives π/2 at k_osc = 1
    p.b_osc.atan2(p.k_osc - 1.0)
}

pub fn local_coeffs(p: &OscillatorParams) -> LocalCoeffs {
    // b_supp only enters at higher order at the grazing point
    LocalCoeffs {
        alpha_l: 1.0,
        beta_l: 1.0,
        gamma_l: 1.0,
        alpha_r: 1.0,
        beta_r: 1.0 + p.k_supp * p.d,
        gamma_r: 1.0,
    }
}

/// Coefficient `c` of the square-root term of the discontinuity map.
pub fn sqrt_coefficient(lc: &LocalCoeffs) -> Result<f64> {
    if !(lc.alpha_l > 0.0 && lc.alpha_r > 0.0 && lc.beta_l > 0.0 && lc.beta_r > 0.0) {
        return Err(Error::DegenerateGrazing(
            "alphaL, alphaR, betaL, betaR must be positive".into(),
        ));
    }
    let c = 2.0 * (2.0 * lc.beta_l).sqrt() / lc.alpha_l.sqrt()
        * (lc.gamma_l / lc.beta_l - lc.gamma_r / lc.beta_r);
    if c == 0.0 {
        return Err(Error::DegenerateGrazing(
            "c = 0 (gammaL/betaL = gammaR/betaR)".into(),
        ));
    }
    Ok(c)
}

/// Closed form of `c` for the oscillator, `2√2 k_supp d / (1 + k_supp d)`.
pub fn sqrt_coefficient_closed_form(p: &OscillatorParams) -> f64 {
    let kd = p.k_supp * p.d;
    2.0 * SQRT_2 * kd / (1.0 + kd)
}

/// `A = exp(2π [[0, 1], [−k_osc, −b_osc]])`, `b = (1 − a11, −a21)/F_graz`.
///
/// The exponential is evaluated in closed form and cross-checked against a
/// scaling-and-squaring series.
pub fn global_linearization(p: &OscillatorParams) -> Result<GlobalLinearization> {
    let generator = Mat2::new(0.0, 1.0, -p.k_osc, -p.b_osc).scale(2.0 * PI);
    let a = expm_closed_form(&generator);
    let check = expm_series(&generator);
    let scale = a.max_abs().max(1.0);
    if !a.is_finite() || (a - check).max_abs() > 1e-12 * scale {
        return Err(Error::DegenerateParameters(format!(
            "matrix exponential routes disagree: {a:?} vs {check:?}"
        )));
    }
    let f_graz = grazing_forcing(p);
    let b = [(1.0 - a.get(0, 0)) / f_graz, -a.get(1, 0) / f_graz];
    Ok(GlobalLinearization { a, b })
}

/// Everything derived from the oscillator that the maps need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduction {
    pub local: LocalCoeffs,
    pub global: GlobalLinearization,
    pub c: f64,
    /// Scale `a12² c²` between `(u, w)` and `(x, y)`.
    pub scale: f64,
}

impl Reduction {
    pub fn new(p: &OscillatorParams) -> Result<Self> {
        p.validate()?;
        let local = local_coeffs(p);
        let c = sqrt_coefficient(&local)?;
        let global = global_linearization(p)?;
        let a12 = global.a.get(0, 1);
        if a12 == 0.0 {
            return Err(Error::DegenerateGrazing("a12 = 0".into()));
        }
        Ok(Self {
            local,
            global,
            c,
            scale: a12 * a12 * c * c,
        })
    }

    pub fn a12(&self) -> f64 {
        self.global.a.get(0, 1)
    }

    /// `dμ/dη`, the lower-right entry of the coordinate change.
    pub fn mu_per_eta(&self) -> f64 {
        let a = &self.global.a;
        ((1.0 - a.get(1, 1)) * self.global.b[0] + a.get(0, 1) * self.global.b[1]) / self.scale
    }

    pub fn mu_from_eta(&self, eta: f64) -> f64 {
        eta * self.mu_per_eta()
    }

    pub fn eta_from_mu(&self, mu: f64) -> f64 {
        mu / self.mu_per_eta()
    }

    /// `(u, w, η) ↦ (x, y, μ)`.
    pub fn to_normal_form(&self, u: f64, w: f64, eta: f64) -> (f64, f64, f64) {
        let a = &self.global.a;
        let x = u / self.scale;
        let y = (-a.get(1, 1) * u + a.get(0, 1) * w + self.global.b[0] * eta) / self.scale;
        (x, y, self.mu_from_eta(eta))
    }

    /// `(x, y, μ) ↦ (u, w, η)`.
    pub fn from_normal_form(&self, x: f64, y: f64, mu: f64) -> (f64, f64, f64) {
        let a = &self.global.a;
        let u = self.scale * x;
        let eta = self.eta_from_mu(mu);
        let w = (self.scale * y + a.get(1, 1) * u - self.global.b[0] * eta) / a.get(0, 1);
        (u, w, eta)
    }

    /// `(τ, δ, χ)` with the supplied `μ`.
    pub fn normal_form_params(&self, mu: f64) -> NordmarkParams {
        let chi = if self.a12() * self.c > 0.0 { 1 } else { -1 };
        NordmarkParams {
            tau: self.global.a.trace(),
            delta: self.global.a.det(),
            chi,
            mu,
        }
    }

    pub fn stochastic_coeffs(&self) -> StochasticMapCoeffs {
        StochasticMapCoeffs {
            a11: self.global.a.get(0, 0),
            a12: self.a12(),
            c: self.c,
            alpha_l: self.local.alpha_l,
            beta_l: self.local.beta_l,
            gamma_l: self.local.gamma_l,
            beta_r: self.local.beta_r,
            gamma_r: self.local.gamma_r,
        }
    }
}

/// `(τ, δ, χ)` for the oscillator; `μ` is left at zero.
pub fn normal_form_params(p: &OscillatorParams) -> Result<NordmarkParams> {
    Ok(Reduction::new(p)?.normal_form_params(0.0))
}

/// Apply the normal-form coordinate change to a point of the flow.
pub fn to_normal_form(u: f64, w: f64, eta: f64, red: &Reduction) -> (f64, f64, f64) {
    red.to_normal_form(u, w, eta)
}

/// A piecewise-smooth vector field in `(u, v, w)` with parameter `η`, switching
/// on `u = 0`.
pub trait PiecewiseField {
    fn left(&self, z: [f64; 3], eta: f64) -> [f64; 3];
    fn right(&self, z: [f64; 3], eta: f64) -> [f64; 3];
}

impl PiecewiseField for OscillatorParams {
    fn left(&self, z: [f64; 3], eta: f64) -> [f64; 3] {
        let [u, v, w] = z;
        let t = w + grazing_phase(self);
        let f = grazing_forcing(self) + eta;
        [
            v,
            -self.k_osc * (u + 1.0) - self.b_osc * v + f * t.cos(),
            1.0,
        ]
    }

    fn right(&self, z: [f64; 3], eta: f64) -> [f64; 3] {
        let [u, v, w] = z;
        let t = w + grazing_phase(self);
        let f = grazing_forcing(self) + eta;
        let acc =
            -self.k_osc * (u + 1.0) - (self.b_osc + self.b_supp) * v - self.k_supp * (u + self.d)
                + f * t.cos();
        [v, acc, 1.0]
    }
}

/// Check the regular-grazing condition `sgn(e1ᵀ f_L) = sgn(e1ᵀ f_R)` on
/// `u = 0` over a 10×10 grid of `(v, w)` for each of three `η` values.
pub fn check_regular_grazing<P: PiecewiseField>(field: &P) -> bool {
    let grid = |i: usize| -0.1 + 0.2 * i as f64 / 9.0;
    for eta in [-0.01, 0.0, 0.01] {
        for i in 0..10 {
            for j in 0..10 {
                let z = [0.0, grid(i), grid(j)];
                let l = field.left(z, eta)[0];
                let r = field.right(z, eta)[0];
                if l.signum() != r.signum() || (l == 0.0) != (r == 0.0) {
                    return false;
                }
            }
        }
    }
    true
}

/// Non-impacting steady state `u_ss(t)`.
pub fn steady_state(p: &OscillatorParams, t: f64) -> f64 {
    let k1 = p.k_osc - 1.0;
    -1.0 + (k1 * t.cos() + p.b_osc * t.sin()) / (k1 * k1 + p.b_osc * p.b_osc) * p.forcing
}

/// Velocity of the steady state, `u_ss'(t)`.
pub fn steady_state_velocity(p: &OscillatorParams, t: f64) -> f64 {
    let k1 = p.k_osc - 1.0;
    (-k1 * t.sin() + p.b_osc * t.cos()) / (k1 * k1 + p.b_osc * p.b_osc) * p.forcing
}
