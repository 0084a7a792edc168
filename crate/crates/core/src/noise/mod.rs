//! Noise sources: the Ornstein–Uhlenbeck process sampled once per cycle, and
//! the first-return law of integrated Brownian motion with drift.

mod first_return;

pub use first_return::{
    first_return_cov_gauss, first_return_mass, first_return_pdf, sample_first_return,
    FirstReturnSample, FirstReturnSampler,
};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Ornstein–Uhlenbeck process `dξ = −ξ/ν dt + ε/ν dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OUParams {
    /// Noise amplitude ε.
    pub eps: f64,
    /// Correlation time ν.
    pub nu: f64,
}

impl OUParams {
    pub fn new(eps: f64, nu: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!(
                "eps must be finite and >= 0, got {eps}"
            )));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!(
                "nu must be finite and > 0, got {nu}"
            )));
        }
        Ok(Self { eps, nu })
    }

    /// Stationary variance `ε²/(2ν)`.
    pub fn stationary_variance(&self) -> f64 {
        self.eps * self.eps / (2.0 * self.nu)
    }

    /// Conditional mean factor and variance after a time `dt`.
    pub fn transition(&self, dt: f64) -> (f64, f64) {
        let decay = (-dt / self.nu).exp();
        // 1 - e^{-2dt/nu} without cancellation for small dt
        let var = self.stationary_variance() * -(-2.0 * dt / self.nu).exp_m1();
        (decay, var)
    }

    /// Draw from the stationary law.
    pub fn sample_stationary<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.stationary_variance().sqrt() * z
    }
}

/// The frozen per-cycle noise value ξ_i.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleNoise {
    pub xi: f64,
}

/// Exact transition of the Ornstein–Uhlenbeck process over a time `dt`.
///
/// A standard normal is always consumed, so the random stream stays aligned
/// whether or not `eps` is zero.
pub fn ou_exact_step<R: Rng + ?Sized>(xi_prev: f64, dt: f64, p: &OUParams, rng: &mut R) -> f64 {
    debug_assert!(dt >= 0.0);
    let (decay, var) = p.transition(dt);
    let z: f64 = rng.sample(StandardNormal);
    xi_prev * decay + var.sqrt() * z
}

/// Advance the per-cycle noise by one period `period` of the grazing orbit.
pub fn ou_cycle_sample<R: Rng + ?Sized>(
    prev: CycleNoise,
    period: f64,
    p: &OUParams,
    rng: &mut R,
) -> CycleNoise {
    CycleNoise {
        xi: ou_exact_step(prev.xi, period, p, rng),
    }
}
