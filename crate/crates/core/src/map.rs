//! The Nordmark normal-form map and its stochastic variants.
//!
//! All four maps share the affine part `g(x, y) = L (x, y)ᵀ + (0, μ)ᵀ` with
//! `L = [[τ, 1], [−δ, 0]]`. On the impacting side the square-root correction
//! is subtracted from the `y` argument before `L` is applied, which is the
//! same as subtracting `(χ√x, 0)` from `g`. Every map evaluates that common
//! form so that a stochastic map fed its deterministic noise values agrees
//! with [`det_step`] bit for bit.

use crate::error::{Error, Result};

/// Normal-form parameters `(τ, δ, χ, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NordmarkParams {
    /// Trace of the global linearization.
    pub tau: f64,
    /// Determinant of the global linearization.
    pub delta: f64,
    /// Sign of the square-root term, ±1.
    pub chi: i8,
    /// Bifurcation parameter; grazing occurs at zero.
    pub mu: f64,
}

impl NordmarkParams {
    pub fn new(tau: f64, delta: f64, chi: i8, mu: f64) -> Result<Self> {
        let p = Self {
            tau,
            delta,
            chi,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi != 1 && self.chi != -1 {
            return Err(Error::DegenerateParameters(format!(
                "chi must be +1 or -1, got {}",
                self.chi
            )));
        }
        if !(self.tau.is_finite() && self.delta.is_finite() && self.mu.is_finite()) {
            return Err(Error::DegenerateParameters(
                "tau, delta and mu must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    #[inline]
    pub fn chi_f64(&self) -> f64 {
        f64::from(self.chi)
    }
}

/// A point `(x, y)` on the Poincaré section.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MapState {
    pub x: f64,
    pub y: f64,
}

impl MapState {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Raw local-expansion and global-map coefficients needed by the stochastic
/// maps. The κ functions are derived from these on every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StochasticMapCoeffs {
    pub a11: f64,
    pub a12: f64,
    pub c: f64,
    pub alpha_l: f64,
    pub beta_l: f64,
    pub gamma_l: f64,
    pub beta_r: f64,
    pub gamma_r: f64,
}

impl StochasticMapCoeffs {
    pub fn validate(&self) -> Result<()> {
        if self.a12 == 0.0 {
            return Err(Error::DegenerateGrazing("a12 = 0".into()));
        }
        if self.c == 0.0 {
            return Err(Error::DegenerateGrazing("c = 0".into()));
        }
        if !(self.alpha_l > 0.0 && self.beta_l > 0.0 && self.beta_r > 0.0) {
            return Err(Error::DegenerateGrazing(
                "alphaL, betaL and betaR must be positive".into(),
            ));
        }
        if self.denominator() == 0.0 {
            return Err(Error::DegenerateGrazing(
                "gammaL/betaL = gammaR/betaR".into(),
            ));
        }
        Ok(())
    }

    /// `γL/βL − γR/βR`, the normalisation shared by κ2 and κ3.
    #[inline]
    fn denominator(&self) -> f64 {
        self.gamma_l / self.beta_l - self.gamma_r / self.beta_r
    }

    /// Scale from `u` to `x`: `κ1 = 1/(a12² c²)`.
    pub fn kappa1(&self) -> f64 {
        1.0 / (self.a12 * self.a12 * self.c * self.c)
    }

    /// Multiplier of `√x` in the impacting branch of N2.
    pub fn kappa2(&self, xi: f64) -> Result<f64> {
        if xi >= self.beta_r {
            return Err(Error::InvalidNoiseDraw {
                xi,
                beta_r: self.beta_r,
            });
        }
        let num = self.gamma_l / self.beta_l - self.gamma_r / (self.beta_r - xi);
        Ok(num / self.denominator())
    }

    /// Multiplier of `√x` in the impacting branch of N3.
    pub fn kappa3(&self, r: f64, h: f64) -> f64 {
        let num =
            self.gamma_l * (h + 1.0) / (2.0 * self.beta_l) - self.gamma_r * r / (2.0 * self.beta_r);
        num / self.denominator()
    }
}

/// Fixed point of the affine part together with its admissibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub state: MapState,
    /// True when the point lies in `x < 0`, i.e. it is a fixed point of the
    /// full map and not only of `g`.
    pub admissible: bool,
}

#[inline]
fn affine(m11: f64, m21: f64, x: f64, y_arg: f64, mu: f64) -> Result<MapState> {
    let out = MapState::new(m11 * x + y_arg, m21 * x + mu);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::NumericOverflow { x: out.x, y: out.y })
    }
}

/// Square root on the impacting side. Branch selection has already been
/// made, so a radicand within roundoff below zero is treated as zero.
#[inline]
fn impact_sqrt(radicand: f64) -> f64 {
    radicand.max(0.0).sqrt()
}

/// One iterate of the deterministic Nordmark map.
pub fn det_step(s: MapState, p: &NordmarkParams) -> Result<MapState> {
    if s.x <= 0.0 {
        affine(p.tau, -p.delta, s.x, s.y, p.mu)
    } else {
        let y_arg = s.y - p.chi_f64() * impact_sqrt(s.x);
        affine(p.tau, -p.delta, s.x, y_arg, p.mu)
    }
}

/// Fixed point `(μ, (1−τ)μ)/(δ−τ+1)` of the affine part.
pub fn fixed_point(p: &NordmarkParams) -> Result<FixedPoint> {
    let denom = p.delta - p.tau + 1.0;
    if denom == 0.0 {
        return Err(Error::DegenerateParameters("delta - tau + 1 = 0".into()));
    }
    let state = MapState::new(p.mu / denom, (1.0 - p.tau) * p.mu / denom);
    Ok(FixedPoint {
        state,
        admissible: state.x < 0.0,
    })
}

/// One iterate of N1 (noise in the switching condition). `xi` is the frozen
/// Ornstein–Uhlenbeck value for this cycle.
pub fn n1_step(
    s: MapState,
    xi: f64,
    p: &NordmarkParams,
    q: &StochasticMapCoeffs,
) -> Result<MapState> {
    let shifted = s.x + xi * q.kappa1();
    if shifted <= 0.0 {
        affine(p.tau, -p.delta, s.x, s.y, p.mu)
    } else {
        let y_arg = s.y - p.chi_f64() * impact_sqrt(shifted);
        affine(p.tau, -p.delta, s.x, y_arg, p.mu)
    }
}

/// One iterate of N2 (coloured noise in the impacting vector field).
pub fn n2_step(
    s: MapState,
    xi: f64,
    p: &NordmarkParams,
    q: &StochasticMapCoeffs,
) -> Result<MapState> {
    if s.x <= 0.0 {
        return affine(p.tau, -p.delta, s.x, s.y, p.mu);
    }
    let k2 = q.kappa2(xi)?;
    let y_arg = s.y - p.chi_f64() * k2 * impact_sqrt(s.x);
    affine(p.tau, -p.delta, s.x, y_arg, p.mu)
}

/// One iterate of N3 (white noise in the impacting vector field), given the
/// scaled first-return time `r` and speed `h` for this impact.
pub fn n3_step(
    s: MapState,
    r: f64,
    h: f64,
    p: &NordmarkParams,
    q: &StochasticMapCoeffs,
) -> Result<MapState> {
    if !(r > 0.0 && h > 0.0) {
        return Err(Error::InvalidSample { r, h });
    }
    if s.x <= 0.0 {
        return affine(p.tau, -p.delta, s.x, s.y, p.mu);
    }
    let h2 = h * h;
    let m11 = p.tau + q.a11 * (h2 - 1.0);
    let m21 = -p.delta * h2;
    let y_arg = s.y - p.chi_f64() * q.kappa3(r, h) * impact_sqrt(s.x);
    affine(m11, m21, s.x, y_arg, p.mu)
}

/// Shape parameter ρ of the first-return law for an impact starting from
/// `x > 0` with noise amplitude `eps`.
pub fn rho_for_state(x: f64, eps: f64, q: &StochasticMapCoeffs) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("rho requires x > 0, got {x}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!(
            "eps must be non-negative, got {eps}"
        )));
    }
    Ok(eps * eps * q.alpha_l.sqrt()
        / (q.beta_r * (2.0 * q.beta_l).sqrt() * (q.a12 * q.c).abs() * x.sqrt()))
}

/// Jacobian of the deterministic map at `s` (right branch for `x > 0`).
pub fn det_jacobian(s: MapState, p: &NordmarkParams) -> [[f64; 2]; 2] {
    let mut m11 = p.tau;
    if s.x > 0.0 {
        m11 -= p.chi_f64() * 0.5 / s.x.sqrt();
    }
    [[m11, 1.0], [-p.delta, 0.0]]
}
