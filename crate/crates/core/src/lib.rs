//! Simulation of regular grazing bifurcations with impact-event noise.
//!
//! The crate provides the Nordmark normal-form map and three stochastic
//! variants ([`map`]), Ornstein–Uhlenbeck noise and the first-return law of
//! integrated Brownian motion with drift ([`noise`]), the compliant impact
//! oscillator and its reduction to normal-form parameters ([`oscillator`]),
//! an event-locating integrator for the oscillator ODE ([`integrator`]) and
//! long-orbit statistics ([`analysis`]).

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod map;
pub mod noise;
pub mod oscillator;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use map::{MapState, NordmarkParams, StochasticMapCoeffs};
pub use noise::{CycleNoise, FirstReturnSample, OUParams};
pub use oscillator::{GlobalLinearization, LocalCoeffs, OscillatorParams};
