//! Return-time fractions `σ_j`: how often a visit to `x > 0` is followed by
//! the next one exactly `j` iterates later.

use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;

use super::Orbit;
use crate::error::{Error, Result};

/// Iterates allowed between two visits to `x > 0`.
pub const STARVATION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnStats {
    /// `j ↦ σ_j`.
    pub sigma: BTreeMap<usize, f64>,
    /// Number of measured returns.
    pub m: usize,
}

impl ReturnStats {
    pub fn sigma(&self, j: usize) -> f64 {
        self.sigma.get(&j).copied().unwrap_or(0.0)
    }

    /// CSV with columns `j,sigma`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,sigma")?;
        for (j, s) in &self.sigma {
            writeln!(out, "{j},{s:.16e}")?;
        }
        Ok(())
    }
}

/// Measure `m` return intervals along `orbit`, after first iterating until
/// the orbit is in `x > 0`.
pub fn return_fractions<R: Rng>(orbit: &mut Orbit<R>, m: usize) -> Result<ReturnStats> {
    if m == 0 {
        return Err(Error::InvalidConfig("need at least one return".into()));
    }
    let wait = |orbit: &mut Orbit<R>| -> Result<usize> {
        for j in 1..=STARVATION_CAP {
            if orbit.step()?.x > 0.0 {
                return Ok(j);
            }
        }
        Err(Error::Starvation {
            cap: STARVATION_CAP,
        })
    };
    if !(orbit.state().x > 0.0) {
        wait(orbit)?;
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for _ in 0..m {
        *counts.entry(wait(orbit)?).or_default() += 1;
    }
    let sigma = counts
        .into_iter()
        .map(|(j, c)| (j, c as f64 / m as f64))
        .collect();
    Ok(ReturnStats { sigma, m })
}
