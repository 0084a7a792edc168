//! One driver per subcommand. Each writes its complete output into a buffer.

use std::io::Write;

use grazesim::analysis::{
    bifurcation_scan, bifurcation_scan_cold, compare_clouds, detect_cycle, invariant_density,
    return_fractions, write_scan_csv, Bounds, DensityConfig, MapModel, MapVariant, Orbit,
};
use grazesim::integrator::{integrate, ode_return_points, FlowState, IntegratorConfig};
use grazesim::noise::FirstReturnSampler;
use grazesim::oscillator::{grazing_phase, local_coeffs, sqrt_coefficient, Reduction};
use grazesim::{rng, MapState, OUParams};

use crate::config::{Model, RunConfig};
use crate::CliError;

/// Longest deterministic period searched for when seeding the clusters.
const MAX_SEED_PERIOD: usize = 32;

fn reduction(cfg: &RunConfig) -> Result<Reduction, CliError> {
    Ok(Reduction::new(&cfg.osc)?)
}

fn ou(cfg: &RunConfig) -> OUParams {
    OUParams {
        eps: cfg.eps,
        nu: cfg.nu,
    }
}

fn start(cfg: &RunConfig) -> MapState {
    MapState::new(cfg.start.0, cfg.start.1)
}

fn map_model(cfg: &RunConfig, variant: MapVariant) -> Result<MapModel, CliError> {
    let red = reduction(cfg)?;
    let mu = cfg.mu(&red)?;
    Ok(MapModel::new(
        variant,
        cfg.normal_form(&red, mu),
        red.stochastic_coeffs(),
        ou(cfg),
    )?)
}

fn require_map(cfg: &RunConfig, command: &str) -> Result<MapVariant, CliError> {
    match cfg.model {
        Model::Map(v) => Ok(v),
        Model::Ode(_) => Err(CliError::Config(format!(
            "{command} needs a map model (det, n1, n2, n3)"
        ))),
    }
}

fn integrator_config(cfg: &RunConfig, stride: usize) -> IntegratorConfig {
    IntegratorConfig {
        dt: cfg.dt,
        seed: cfg.seed,
        sample_stride: stride,
        ..IntegratorConfig::default()
    }
    .with_noise(cfg.model.ode_mode(), ou(cfg))
}

pub fn osc_params(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let p = &cfg.osc;
    p.validate()?;
    let lc = local_coeffs(p);
    writeln!(out, "F_graz={}", p.grazing_forcing())?;
    writeln!(out, "t_graz={}", grazing_phase(p))?;
    writeln!(out, "alphaL={}", lc.alpha_l)?;
    writeln!(out, "betaL={}", lc.beta_l)?;
    writeln!(out, "gammaL={}", lc.gamma_l)?;
    writeln!(out, "alphaR={}", lc.alpha_r)?;
    writeln!(out, "betaR={}", lc.beta_r)?;
    writeln!(out, "gammaR={}", lc.gamma_r)?;
    // fails here with the violated condition when the grazing is degenerate
    let c = sqrt_coefficient(&lc)?;
    writeln!(out, "c={c}")?;
    let red = reduction(cfg)?;
    let a = &red.global.a;
    writeln!(
        out,
        "A=[[{}, {}], [{}, {}]]",
        a.get(0, 0),
        a.get(0, 1),
        a.get(1, 0),
        a.get(1, 1)
    )?;
    writeln!(out, "b=[{}, {}]", red.global.b[0], red.global.b[1])?;
    let mu = cfg.mu(&red).ok();
    let nf = cfg.normal_form(&red, mu.unwrap_or(0.0));
    writeln!(out, "tau={}", nf.tau)?;
    writeln!(out, "delta={}", nf.delta)?;
    writeln!(out, "chi={}", nf.chi)?;
    writeln!(out, "a12={}", red.a12())?;
    writeln!(out, "kappa1={}", red.stochastic_coeffs().kappa1())?;
    writeln!(out, "mu_per_eta={}", red.mu_per_eta())?;
    writeln!(out, "eta_per_mu={}", 1.0 / red.mu_per_eta())?;
    if let Some(mu) = mu {
        let eta = red.eta_from_mu(mu);
        writeln!(out, "mu={mu}")?;
        writeln!(out, "eta={eta}")?;
        writeln!(out, "F={}", p.grazing_forcing() + eta)?;
    }
    Ok(())
}

pub fn bifdiag(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let variant = require_map(cfg, "bifdiag")?;
    let red = reduction(cfg)?;
    let (lo, hi, steps) = cfg.mu_range;
    let nf = cfg.normal_form(&red, lo);
    let model = MapModel::new(variant, nf, red.stochastic_coeffs(), ou(cfg))?;
    let mus: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let scan = if cfg.cold_scan {
        bifurcation_scan_cold
    } else {
        bifurcation_scan
    };
    let points = scan(
        &model,
        &mus,
        cfg.transient,
        cfg.n_or(200),
        start(cfg),
        cfg.seed,
    );
    write_scan_csv(&points, out)?;
    Ok(())
}

pub fn density(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let model = map_model(cfg, require_map(cfg, "density")?)?;
    let dc = DensityConfig {
        n: cfg.n_or(1_000_000),
        transient: cfg.transient,
        nx: cfg.grid.0,
        ny: cfg.grid.1,
        bounds: Bounds::Auto { margin: 0.1 },
        replicas: cfg.replicas,
    };
    invariant_density(&model, &dc, start(cfg), cfg.seed)?.write_text(out)?;
    Ok(())
}

pub fn sigma(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let model = map_model(cfg, require_map(cfg, "sigma")?)?;
    let mut orbit = Orbit::new(model, start(cfg), rng::stream(cfg.seed, 0));
    orbit.skip(cfg.transient)?;
    return_fractions(&mut orbit, cfg.n_or(10_000))?.write_csv(out)?;
    Ok(())
}

/// Map orbit as `i,x,y` rows, or ODE trajectory over `n` forcing periods.
pub fn orbit(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    match cfg.model {
        Model::Map(variant) => {
            let model = map_model(cfg, variant)?;
            let mut orbit = Orbit::new(model, start(cfg), rng::stream(cfg.seed, 0));
            writeln!(out, "i,x,y")?;
            let s = orbit.state();
            writeln!(out, "0,{:.16e},{:.16e}", s.x, s.y)?;
            for i in 1..=cfg.n_or(1000) {
                let s = orbit.step()?;
                writeln!(out, "{i},{:.16e},{:.16e}", s.x, s.y)?;
            }
        }
        Model::Ode(_) => {
            if cfg.stride == 0 {
                return Err(CliError::Config(
                    "stride must be positive for a trajectory".into(),
                ));
            }
            let red = reduction(cfg)?;
            let p = cfg.forced_oscillator(&red)?;
            let ic = integrator_config(cfg, cfg.stride);
            let s0 = FlowState::on_steady_state(&p, 0.0);
            let t_end = 2.0 * std::f64::consts::PI * cfg.n_or(10) as f64;
            let traj = integrate(&p, &ic, s0, t_end, &mut rng::stream(cfg.seed, 0))?;
            traj.write_csv(out)?;
        }
    }
    Ok(())
}

/// Cluster `n` map iterates and `n` ODE return points around the deterministic
/// cycle and report per-cluster statistics.
pub fn compare(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    if cfg.direct.is_some() {
        return Err(CliError::Config(
            "compare needs the oscillator, not direct tau/delta/chi".into(),
        ));
    }
    let variant = cfg.model.map_variant();
    let model = map_model(cfg, variant)?;
    let n = cfg.n_or(1000);
    let cycle = detect_cycle(
        &model.params,
        start(cfg),
        cfg.transient,
        MAX_SEED_PERIOD,
        1e-9,
    )?
    .ok_or_else(|| {
        CliError::Numeric(format!(
            "no deterministic cycle of period <= {MAX_SEED_PERIOD}"
        ))
    })?;
    let seeds: Vec<(f64, f64)> = cycle.canonical().iter().map(|s| (s.x, s.y)).collect();

    let mut orbit = Orbit::new(model, cycle.canonical()[0], rng::stream(cfg.seed, 0));
    orbit.skip(cfg.transient)?;
    let map_pts: Vec<(f64, f64)> = orbit.collect(n)?.iter().map(|s| (s.x, s.y)).collect();

    let red = reduction(cfg)?;
    let p = cfg.forced_oscillator(&red)?;
    let ode_pts = ode_return_points(
        &p,
        &integrator_config(cfg, 0),
        n,
        // ODE transients are counted in forcing periods and settle quickly
        cfg.transient.min(100),
        &mut rng::stream(cfg.seed, 1),
    )?;

    let cmp = compare_clouds(&map_pts, &ode_pts, &seeds)?;
    writeln!(
        out,
        "cluster,seed_x,seed_y,n_map,n_ode,cx_map,cy_map,cx_ode,cy_ode,\
         sx_map,sy_map,sx_ode,sy_ode,offset,std_map,std_ode,std_ratio"
    )?;
    for (k, c) in cmp.clusters.iter().enumerate() {
        writeln!(
            out,
            "{k},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},\
             {:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            c.seed.0,
            c.seed.1,
            c.n_a,
            c.n_b,
            c.centroid_a.0,
            c.centroid_a.1,
            c.centroid_b.0,
            c.centroid_b.1,
            c.std_a.0,
            c.std_a.1,
            c.std_b.0,
            c.std_b.1,
            c.offset,
            c.total_std_a,
            c.total_std_b,
            c.std_ratio
        )?;
    }
    Ok(())
}

pub fn sample_fr(cfg: &RunConfig, out: &mut Vec<u8>) -> Result<(), CliError> {
    let rho = cfg
        .rho
        .ok_or_else(|| CliError::Config("sample-fr needs rho".into()))?;
    let sampler = FirstReturnSampler::new(rho)?;
    let mut r = rng::stream(cfg.seed, 0);
    writeln!(out, "r,h")?;
    for _ in 0..cfg.n_or(100_000) {
        let s = sampler.sample(&mut r);
        writeln!(out, "{:.16e},{:.16e}", s.r, s.h)?;
    }
    Ok(())
}
