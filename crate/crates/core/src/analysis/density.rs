//! Invariant-density histograms from long orbits.

use std::io::Write;

use rayon::prelude::*;

use super::{MapModel, Orbit, DEFAULT_TRANSIENT};
use crate::error::{Error, Result};
use crate::map::MapState;
use crate::rng;

/// Iterates of the pilot orbit used to fit automatic bounds.
pub const PILOT_ITERATES: usize = 10_000;

/// Stream id reserved for the pilot orbit; replicas use `0..replicas`.
const PILOT_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = self.x_min.is_finite()
            && self.x_max.is_finite()
            && self.y_min.is_finite()
            && self.y_max.is_finite()
            && self.x_max > self.x_min
            && self.y_max > self.y_min
            && self.nx > 0
            && self.ny > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid grid {self:?}")))
        }
    }

    fn cell(&self, x: f64, y: f64) -> Option<usize> {
        let fx = (x - self.x_min) / (self.x_max - self.x_min);
        let fy = (y - self.y_min) / (self.y_max - self.y_min);
        if !(0.0..=1.0).contains(&fx) || !(0.0..=1.0).contains(&fy) {
            return None;
        }
        // the upper edges belong to the last cells
        let i = ((fx * self.nx as f64) as usize).min(self.nx - 1);
        let j = ((fy * self.ny as f64) as usize).min(self.ny - 1);
        Some(j * self.nx + i)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        let dx = (self.x_max - self.x_min) / self.nx as f64;
        let dy = (self.y_max - self.y_min) / self.ny as f64;
        (
            self.x_min + (i as f64 + 0.5) * dx,
            self.y_min + (j as f64 + 0.5) * dy,
        )
    }

    pub fn cell_area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min) / (self.nx * self.ny) as f64
    }
}

/// Histogram over a rectangular grid. Cell `(i, j)` is stored at `j·nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub spec: GridSpec,
    pub counts: Vec<u64>,
    pub out_of_range: u64,
    pub total: u64,
}

impl DensityGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec,
            counts: vec![0; spec.nx * spec.ny],
            out_of_range: 0,
            total: 0,
        })
    }

    pub fn add(&mut self, x: f64, y: f64) {
        self.total += 1;
        match self.spec.cell(x, y) {
            Some(k) => self.counts[k] += 1,
            None => self.out_of_range += 1,
        }
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[j * self.spec.nx + i]
    }

    pub fn in_range(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Add another histogram on the same grid.
    pub fn merge(&mut self, other: &DensityGrid) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::InvalidConfig(
                "cannot merge histograms on different grids".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.out_of_range += other.out_of_range;
        self.total += other.total;
        Ok(())
    }

    /// Density value of a cell, normalised by the total count so that the
    /// integral over the grid equals the in-range fraction.
    pub fn density(&self, i: usize, j: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.count(i, j) as f64 / (self.total as f64 * self.spec.cell_area())
    }

    /// Integral of the normalised density over the grid.
    pub fn integral(&self) -> f64 {
        let area = self.spec.cell_area();
        (0..self.spec.ny)
            .flat_map(|j| (0..self.spec.nx).map(move |i| (i, j)))
            .map(|(i, j)| self.density(i, j) * area)
            .sum()
    }

    /// Fraction of all samples lying in cells whose centre is within `radius`
    /// of one of `centers`.
    pub fn mass_near(&self, centers: &[(f64, f64)], radius: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let mut inside = 0u64;
        for j in 0..self.spec.ny {
            for i in 0..self.spec.nx {
                let (x, y) = self.spec.cell_center(i, j);
                if centers
                    .iter()
                    .any(|&(cx, cy)| (x - cx).hypot(y - cy) <= radius)
                {
                    inside += self.count(i, j);
                }
            }
        }
        inside as f64 / self.total as f64
    }

    /// Fraction of all samples in cells whose centre has `x > 0`.
    pub fn mass_right(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let mut right = 0u64;
        for j in 0..self.spec.ny {
            for i in 0..self.spec.nx {
                if self.spec.cell_center(i, j).0 > 0.0 {
                    right += self.count(i, j);
                }
            }
        }
        right as f64 / self.total as f64
    }

    pub fn occupied_cells(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Text format: a header with bounds, sizes and totals, then `ny` rows of
    /// `nx` counts, lowest `y` first.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let s = &self.spec;
        writeln!(out, "# x_min={:.16e} x_max={:.16e}", s.x_min, s.x_max)?;
        writeln!(out, "# y_min={:.16e} y_max={:.16e}", s.y_min, s.y_max)?;
        writeln!(
            out,
            "# nx={} ny={} total={} out_of_range={}",
            s.nx, s.ny, self.total, self.out_of_range
        )?;
        for row in self.counts.chunks(s.nx) {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bounds {
    Fixed {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    /// Fit to a pilot orbit with a relative margin on each side.
    Auto { margin: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityConfig {
    /// Iterates per replica after the transient.
    pub n: usize,
    pub transient: usize,
    pub nx: usize,
    pub ny: usize,
    pub bounds: Bounds,
    /// Independent orbits, each contributing `n` iterates.
    pub replicas: usize,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self {
            n: 1_000_000,
            transient: DEFAULT_TRANSIENT,
            nx: 256,
            ny: 256,
            bounds: Bounds::Auto { margin: 0.1 },
            replicas: 1,
        }
    }
}

fn fit_bounds(points: &[MapState], margin: f64) -> (f64, f64, f64, f64) {
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in points {
        x0 = x0.min(s.x);
        x1 = x1.max(s.x);
        y0 = y0.min(s.y);
        y1 = y1.max(s.y);
    }
    // a point attractor still needs a grid of positive size
    let pad = |lo: f64, hi: f64| {
        let w = (hi - lo).max(1e-9 * lo.abs().max(hi.abs()).max(1.0));
        (lo - margin * w, hi + margin * w)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    (x0, x1, y0, y1)
}

/// Histogram of orbit iterates after a transient. Replica `k` uses stream
/// `(seed, k)` and replicas run in parallel; the result does not depend on
/// the thread count.
pub fn invariant_density(
    model: &MapModel,
    cfg: &DensityConfig,
    s0: MapState,
    seed: u64,
) -> Result<DensityGrid> {
    if cfg.replicas == 0 || cfg.n == 0 {
        return Err(Error::InvalidConfig(
            "density needs n > 0 and replicas > 0".into(),
        ));
    }
    let (x_min, x_max, y_min, y_max) = match cfg.bounds {
        Bounds::Fixed {
            x_min,
            x_max,
            y_min,
            y_max,
        } => (x_min, x_max, y_min, y_max),
        Bounds::Auto { margin } => {
            let mut pilot = Orbit::new(*model, s0, rng::stream(seed, PILOT_STREAM));
            pilot.skip(cfg.transient)?;
            fit_bounds(&pilot.collect(PILOT_ITERATES)?, margin)
        }
    };
    let spec = GridSpec {
        x_min,
        x_max,
        y_min,
        y_max,
        nx: cfg.nx,
        ny: cfg.ny,
    };
    spec.validate()?;

    let parts: Vec<Result<DensityGrid>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|k| {
            let mut grid = DensityGrid::new(spec)?;
            let mut orbit = Orbit::new(*model, s0, rng::stream(seed, k as u64));
            orbit.skip(cfg.transient)?;
            for _ in 0..cfg.n {
                let s = orbit.step()?;
                grid.add(s.x, s.y);
            }
            Ok(grid)
        })
        .collect();
    let mut out = DensityGrid::new(spec)?;
    for part in parts {
        out.merge(&part?)?;
    }
    Ok(out)
}
