//! Long-orbit statistics of the deterministic and stochastic maps.

mod clouds;
mod cycles;
mod density;
mod returns;
mod scan;
pub mod stats;

pub use clouds::{compare_clouds, CloudComparison, ClusterComparison};
pub use cycles::{
    classify_attractor, cycle_multiplier, detect_cycle, largest_lyapunov, survey_attractors,
    Attractor, Cycle,
};
pub use density::{invariant_density, Bounds, DensityConfig, DensityGrid, GridSpec};
pub use returns::{return_fractions, ReturnStats, STARVATION_CAP};
pub use scan::{bifurcation_scan, bifurcation_scan_cold, write_scan_csv, ScanPoint};

use rand::Rng;

use crate::error::{Error, Result};
use crate::map::StochasticMapCoeffs;
use crate::map::{det_step, n1_step, n2_step, n3_step, rho_for_state, MapState, NordmarkParams};
use crate::noise::{ou_cycle_sample, CycleNoise, FirstReturnSample, FirstReturnSampler, OUParams};
use crate::oscillator::{OscillatorParams, Reduction};

/// Default number of discarded iterates before statistics are collected.
pub const DEFAULT_TRANSIENT: usize = 1_000;

/// Correlation time used for N1 and N2 unless overridden.
pub const DEFAULT_NU: f64 = 0.5;

/// Period of the grazing orbit, the sampling interval of the per-cycle noise.
pub const CYCLE_PERIOD: f64 = 2.0 * std::f64::consts::PI;

/// Orbits whose state exceeds this magnitude are declared divergent.
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapVariant {
    Det,
    N1,
    N2,
    N3,
}

impl MapVariant {
    pub fn name(self) -> &'static str {
        match self {
            MapVariant::Det => "det",
            MapVariant::N1 => "n1",
            MapVariant::N2 => "n2",
            MapVariant::N3 => "n3",
        }
    }

    /// Index `j` of the stochastic map, used for noise calibration.
    pub fn index(self) -> Option<u8> {
        match self {
            MapVariant::Det => None,
            MapVariant::N1 => Some(1),
            MapVariant::N2 => Some(2),
            MapVariant::N3 => Some(3),
        }
    }
}

/// Calibrated noise amplitude `ε = ẽ_j α`, chosen so that the stochastic
/// contribution to each map has standard deviation about `0.01 α` near the
/// 3-cycle at `μ = 0.03`.
pub fn epsilon_for_alpha(model: u8, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    let base = match model {
        1 => 0.0001,
        2 => 0.125,
        3 => 0.022,
        _ => return Err(Error::InvalidConfig(format!("unknown model id {model}"))),
    };
    Ok(base * alpha)
}

/// Standard deviation of the calibrated stochastic contribution at level `α`.
pub fn calibrated_noise_std(alpha: f64) -> f64 {
    0.01 * alpha
}

/// A map together with everything needed to iterate it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapModel {
    pub variant: MapVariant,
    pub params: NordmarkParams,
    pub coeffs: StochasticMapCoeffs,
    pub ou: OUParams,
    /// Time between impacts used for the per-cycle noise update.
    pub period: f64,
}

impl MapModel {
    pub fn new(
        variant: MapVariant,
        params: NordmarkParams,
        coeffs: StochasticMapCoeffs,
        ou: OUParams,
    ) -> Result<Self> {
        params.validate()?;
        if variant != MapVariant::Det {
            coeffs.validate()?;
        }
        OUParams::new(ou.eps, ou.nu)?;
        Ok(Self {
            variant,
            params,
            coeffs,
            ou,
            period: CYCLE_PERIOD,
        })
    }

    /// Model built from the oscillator's normal-form reduction.
    pub fn from_oscillator(
        variant: MapVariant,
        osc: &OscillatorParams,
        mu: f64,
        ou: OUParams,
    ) -> Result<Self> {
        let red = Reduction::new(osc)?;
        Self::new(
            variant,
            red.normal_form_params(mu),
            red.stochastic_coeffs(),
            ou,
        )
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.params.mu = mu;
        self
    }

    pub fn with_variant(mut self, variant: MapVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.ou.eps = eps;
        self
    }
}

/// A single orbit of a map model with its own noise state.
#[derive(Debug, Clone)]
pub struct Orbit<R> {
    model: MapModel,
    state: MapState,
    noise: CycleNoise,
    rng: R,
    iterate: u64,
}

impl<R: Rng> Orbit<R> {
    /// Start at `s0`; N1 and N2 draw their initial `ξ` from the stationary law.
    pub fn new(model: MapModel, s0: MapState, mut rng: R) -> Self {
        let xi = match model.variant {
            MapVariant::N1 | MapVariant::N2 => model.ou.sample_stationary(&mut rng),
            _ => 0.0,
        };
        Self {
            model,
            state: s0,
            noise: CycleNoise { xi },
            rng,
            iterate: 0,
        }
    }

    pub fn state(&self) -> MapState {
        self.state
    }

    pub fn model(&self) -> &MapModel {
        &self.model
    }

    pub fn iterate(&self) -> u64 {
        self.iterate
    }

    /// Change `μ` while keeping the state and noise, for continuation.
    pub fn set_mu(&mut self, mu: f64) {
        self.model.params.mu = mu;
    }

    pub fn set_state(&mut self, s: MapState) {
        self.state = s;
    }

    /// Noise pair `(r, h)` for an impact from `x > 0`.
    fn first_return_draw(&mut self, x: f64) -> Result<FirstReturnSample> {
        let rho = rho_for_state(x, self.model.ou.eps, &self.model.coeffs)?;
        if rho == 0.0 {
            return Ok(FirstReturnSample::DETERMINISTIC);
        }
        Ok(FirstReturnSampler::new(rho)?.sample(&mut self.rng))
    }

    pub fn step(&mut self) -> Result<MapState> {
        let m = &self.model;
        let s = self.state;
        let next = match m.variant {
            MapVariant::Det => det_step(s, &m.params)?,
            MapVariant::N1 | MapVariant::N2 => {
                let out = if m.variant == MapVariant::N1 {
                    n1_step(s, self.noise.xi, &m.params, &m.coeffs)?
                } else {
                    n2_step(s, self.noise.xi, &m.params, &m.coeffs)?
                };
                self.noise = ou_cycle_sample(self.noise, m.period, &m.ou, &mut self.rng);
                out
            }
            MapVariant::N3 => {
                let fr = if s.x > 0.0 {
                    self.first_return_draw(s.x)?
                } else {
                    FirstReturnSample::DETERMINISTIC
                };
                let m = &self.model;
                n3_step(s, fr.r, fr.h, &m.params, &m.coeffs)?
            }
        };
        if next.x.abs() > DIVERGENCE_BOUND || next.y.abs() > DIVERGENCE_BOUND {
            return Err(Error::Divergent {
                mu: self.model.params.mu,
                iterations: self.iterate as usize + 1,
            });
        }
        self.state = next;
        self.iterate += 1;
        Ok(next)
    }

    /// Iterate `n` times, discarding the states.
    pub fn skip(&mut self, n: usize) -> Result<MapState> {
        for _ in 0..n {
            self.step()?;
        }
        Ok(self.state)
    }

    /// Iterate `n` times and collect the states.
    pub fn collect(&mut self, n: usize) -> Result<Vec<MapState>> {
        (0..n).map(|_| self.step()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn model(variant: MapVariant, mu: f64, eps: f64) -> MapModel {
        let osc = OscillatorParams::reference();
        MapModel::from_oscillator(
            variant,
            &osc,
            mu,
            OUParams {
                eps,
                nu: DEFAULT_NU,
            },
        )
        .unwrap()
    }

    #[test]
    fn epsilon_table() {
        assert_eq!(epsilon_for_alpha(1, 1.0).unwrap(), 0.0001);
        assert_eq!(epsilon_for_alpha(2, 3.0).unwrap(), 0.375);
        assert_eq!(epsilon_for_alpha(3, 0.0).unwrap(), 0.0);
        assert!(epsilon_for_alpha(4, 1.0).is_err());
        assert!(epsilon_for_alpha(1, -1.0).is_err());
    }

    #[test]
    fn zero_noise_orbits_match_deterministic() {
        let s0 = MapState::new(0.01, 0.02);
        let det: Vec<_> = Orbit::new(model(MapVariant::Det, 0.03, 0.0), s0, rng::stream(1, 0))
            .collect(500)
            .unwrap();
        for v in [MapVariant::N1, MapVariant::N2, MapVariant::N3] {
            let got = Orbit::new(model(v, 0.03, 0.0), s0, rng::stream(1, 0))
                .collect(500)
                .unwrap();
            assert_eq!(got, det, "{v:?}");
        }
    }

    #[test]
    fn orbits_are_reproducible() {
        let s0 = MapState::new(0.01, 0.02);
        for v in [MapVariant::N1, MapVariant::N2, MapVariant::N3] {
            let m = model(v, 0.03, epsilon_for_alpha(v.index().unwrap(), 1.0).unwrap());
            let a = Orbit::new(m, s0, rng::stream(5, 2)).collect(200).unwrap();
            let b = Orbit::new(m, s0, rng::stream(5, 2)).collect(200).unwrap();
            let c = Orbit::new(m, s0, rng::stream(5, 3)).collect(200).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn divergence_is_reported() {
        let p = NordmarkParams {
            tau: 3.0,
            delta: 0.1,
            chi: 1,
            mu: -1.0,
        };
        let m = MapModel::new(
            MapVariant::Det,
            p,
            model(MapVariant::Det, 0.0, 0.0).coeffs,
            OUParams { eps: 0.0, nu: 0.5 },
        )
        .unwrap();
        let mut orbit = Orbit::new(m, MapState::new(-1.0, 0.0), rng::stream(0, 0));
        assert!(matches!(orbit.skip(1000), Err(Error::Divergent { .. })));
    }
}
