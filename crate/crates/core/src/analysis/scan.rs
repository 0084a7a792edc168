//! Bifurcation scans over `μ`.

use std::io::Write;

use rayon::prelude::*;

use super::{MapModel, Orbit};
use crate::error::Error;
use crate::map::MapState;
use crate::rng;

/// Kept `x` values at one `μ`, or the reason the orbit was abandoned.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub mu: f64,
    pub xs: Vec<f64>,
    pub failure: Option<Error>,
}

impl ScanPoint {
    /// Spread `max − min` of the kept values.
    pub fn spread(&self) -> f64 {
        let lo = self.xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }
}

fn run_one<R: rand::Rng>(
    orbit: &mut Orbit<R>,
    mu: f64,
    n_transient: usize,
    n_keep: usize,
) -> ScanPoint {
    orbit.set_mu(mu);
    let result = orbit
        .skip(n_transient)
        .and_then(|_| (0..n_keep).map(|_| orbit.step().map(|s| s.x)).collect());
    match result {
        Ok(xs) => ScanPoint {
            mu,
            xs,
            failure: None,
        },
        Err(e) => ScanPoint {
            mu,
            xs: Vec::new(),
            failure: Some(e),
        },
    }
}

/// Continuation scan: each `μ` starts from the final state of the previous
/// one. After a divergent orbit the next `μ` restarts from `s0`.
pub fn bifurcation_scan(
    model: &MapModel,
    mu_values: &[f64],
    n_transient: usize,
    n_keep: usize,
    s0: MapState,
    seed: u64,
) -> Vec<ScanPoint> {
    let mut orbit = Orbit::new(*model, s0, rng::stream(seed, 0));
    let mut out = Vec::with_capacity(mu_values.len());
    for &mu in mu_values {
        let point = run_one(&mut orbit, mu, n_transient, n_keep);
        if point.failure.is_some() {
            orbit.set_state(s0);
        }
        out.push(point);
    }
    out
}

/// Independent scan: every `μ` starts from `s0` with its own random stream,
/// so the values can be computed in parallel.
pub fn bifurcation_scan_cold(
    model: &MapModel,
    mu_values: &[f64],
    n_transient: usize,
    n_keep: usize,
    s0: MapState,
    seed: u64,
) -> Vec<ScanPoint> {
    mu_values
        .par_iter()
        .enumerate()
        .map(|(i, &mu)| {
            let mut orbit = Orbit::new(model.with_mu(mu), s0, rng::stream(seed, i as u64));
            run_one(&mut orbit, mu, n_transient, n_keep)
        })
        .collect()
}

/// CSV with columns `mu,x`; failed values of `μ` are listed in comment lines.
pub fn write_scan_csv<W: Write>(points: &[ScanPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "mu,x")?;
    for p in points {
        if let Some(e) = &p.failure {
            writeln!(out, "# mu={:.16e} failed: {e}", p.mu)?;
        }
        for x in &p.xs {
            writeln!(out, "{:.16e},{:.16e}", p.mu, x)?;
        }
    }
    Ok(())
}
