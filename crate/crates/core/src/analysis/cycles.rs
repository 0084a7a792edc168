//! Periodic orbits, their stability, and a chaos indicator for the
//! deterministic map.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::Mat2;
use crate::map::{det_jacobian, det_step, MapState, NordmarkParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub points: Vec<MapState>,
}

impl Cycle {
    pub fn period(&self) -> usize {
        self.points.len()
    }

    /// Points rotated so the one with the largest `x` comes first.
    pub fn canonical(&self) -> Vec<MapState> {
        let start = self
            .points
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.x.total_cmp(&b.1.x))
            .map_or(0, |(i, _)| i);
        let n = self.points.len();
        (0..n).map(|i| self.points[(start + i) % n]).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Attractor {
    Periodic(Cycle),
    /// No period up to the search limit; carries the largest Lyapunov
    /// exponent estimate.
    Aperiodic {
        lyapunov: f64,
    },
}

fn close(a: MapState, b: MapState, tol: f64) -> bool {
    (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol
}

/// After `transient` iterates from `s0`, look for the smallest period
/// `p ≤ max_period` such that the orbit repeats to within `tol` over two
/// full turns.
pub fn detect_cycle(
    p: &NordmarkParams,
    s0: MapState,
    transient: usize,
    max_period: usize,
    tol: f64,
) -> Result<Option<Cycle>> {
    let mut s = s0;
    for _ in 0..transient {
        s = det_step(s, p)?;
    }
    let mut orbit = Vec::with_capacity(2 * max_period + 1);
    orbit.push(s);
    for _ in 0..2 * max_period {
        s = det_step(s, p)?;
        orbit.push(s);
    }
    for period in 1..=max_period {
        if (0..=period).all(|i| close(orbit[i], orbit[i + period], tol)) {
            return Ok(Some(Cycle {
                points: orbit[..period].to_vec(),
            }));
        }
    }
    Ok(None)
}

/// Product of Jacobians around the cycle; the cycle attracts when its spectral
/// radius is below one.
pub fn cycle_multiplier(p: &NordmarkParams, cycle: &Cycle) -> Mat2 {
    cycle
        .points
        .iter()
        .fold(Mat2::IDENTITY, |acc, &s| Mat2(det_jacobian(s, p)) * acc)
}

/// Largest Lyapunov exponent by tangent-vector renormalisation.
pub fn largest_lyapunov(
    p: &NordmarkParams,
    s0: MapState,
    transient: usize,
    n: usize,
) -> Result<f64> {
    let mut s = s0;
    for _ in 0..transient {
        s = det_step(s, p)?;
    }
    let mut v = [1.0, 0.0];
    let mut sum = 0.0;
    for _ in 0..n {
        v = Mat2(det_jacobian(s, p)).apply(v);
        let norm = v[0].hypot(v[1]);
        sum += norm.ln();
        v = [v[0] / norm, v[1] / norm];
        s = det_step(s, p)?;
    }
    Ok(sum / n as f64)
}

/// Classify the attractor reached from `s0`.
pub fn classify_attractor(
    p: &NordmarkParams,
    s0: MapState,
    transient: usize,
    max_period: usize,
    lyapunov_iterates: usize,
) -> Result<Attractor> {
    match detect_cycle(p, s0, transient, max_period, 1e-9)? {
        Some(c) => Ok(Attractor::Periodic(c)),
        None => Ok(Attractor::Aperiodic {
            lyapunov: largest_lyapunov(p, s0, transient, lyapunov_iterates)?,
        }),
    }
}

/// Classify the attractors reached from each of `starts`, in parallel.
pub fn survey_attractors(
    p: &NordmarkParams,
    starts: &[MapState],
    transient: usize,
    max_period: usize,
    lyapunov_iterates: usize,
) -> Vec<Result<Attractor>> {
    starts
        .par_iter()
        .map(|&s0| classify_attractor(p, s0, transient, max_period, lyapunov_iterates))
        .collect()
}
