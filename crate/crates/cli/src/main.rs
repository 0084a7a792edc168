//! `grazesim`: data files for grazing-bifurcation studies.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RawConfig, RunConfig};

#[derive(Parser)]
#[command(
    name = "grazesim",
    version,
    about = "Simulate noisy grazing bifurcations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Report the normal-form quantities derived from the oscillator
    OscParams,
    /// Bifurcation diagram as `mu,x` CSV
    Bifdiag,
    /// Invariant-density histogram
    Density,
    /// Return-time fractions as `j,sigma` CSV
    Sigma,
    /// One map orbit or ODE trajectory
    Orbit,
    /// Per-cluster comparison of map iterates with ODE return points
    Compare,
    /// Draws from the first-return law as `r,h` CSV
    SampleFr,
}

/// Options shared by all commands. Every flag mirrors a config-file key.
#[derive(Args, Default)]
struct Opts {
    /// Read settings from a `key = value` file; flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the effective settings to this file
    #[arg(long = "dump-config", global = true)]
    dump_config: Option<PathBuf>,
    /// det, n1, n2, n3, ode-none, ode-switching, ode-impact-ou or ode-impact-white
    #[arg(long, global = true)]
    model: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Forcing amplitude, instead of mu
    #[arg(long = "F", global = true)]
    forcing: Option<String>,
    /// Calibrated noise level, instead of eps
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    eps: Option<String>,
    /// Noise correlation time [default: 0.5]
    #[arg(long, global = true)]
    nu: Option<String>,
    /// Random seed [default: $GRAZESIM_SEED or 0]
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Command-specific sample size
    #[arg(long, global = true)]
    n: Option<String>,
    /// Histogram size, `N` or `NXxNY` [default: 256]
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long = "mu-min", global = true, allow_hyphen_values = true)]
    mu_min: Option<String>,
    #[arg(long = "mu-max", global = true, allow_hyphen_values = true)]
    mu_max: Option<String>,
    #[arg(long = "mu-steps", global = true)]
    mu_steps: Option<String>,
    /// Output file [default: stdout]
    #[arg(long, global = true)]
    out: Option<String>,
    /// Cap on worker threads
    #[arg(long, global = true)]
    threads: Option<String>,
    #[arg(long = "k-osc", global = true)]
    k_osc: Option<String>,
    #[arg(long = "b-osc", global = true)]
    b_osc: Option<String>,
    #[arg(long = "k-supp", global = true)]
    k_supp: Option<String>,
    #[arg(long = "b-supp", global = true)]
    b_supp: Option<String>,
    #[arg(long, global = true)]
    d: Option<String>,
    /// Direct normal-form trace, with delta and chi
    #[arg(long, global = true, allow_hyphen_values = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    chi: Option<String>,
    /// Discarded iterates before statistics [default: 1000]
    #[arg(long, global = true)]
    transient: Option<String>,
    /// Drift parameter for sample-fr
    #[arg(long, global = true)]
    rho: Option<String>,
    /// ODE time step [default: 1e-3]
    #[arg(long, global = true)]
    dt: Option<String>,
    /// Independent orbits for density [default: 1]
    #[arg(long, global = true)]
    replicas: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    y0: Option<String>,
    /// Bifurcation scan: warm (continuation) or cold (independent, parallel)
    #[arg(long, global = true)]
    scan: Option<String>,
    /// ODE steps between trajectory samples [default: 10]
    #[arg(long, global = true)]
    stride: Option<String>,
}

impl Opts {
    fn flags(&self) -> RawConfig {
        let pairs = [
            ("model", &self.model),
            ("mu", &self.mu),
            ("F", &self.forcing),
            ("alpha", &self.alpha),
            ("eps", &self.eps),
            ("nu", &self.nu),
            ("seed", &self.seed),
            ("n", &self.n),
            ("grid", &self.grid),
            ("mu-min", &self.mu_min),
            ("mu-max", &self.mu_max),
            ("mu-steps", &self.mu_steps),
            ("out", &self.out),
            ("threads", &self.threads),
            ("k-osc", &self.k_osc),
            ("b-osc", &self.b_osc),
            ("k-supp", &self.k_supp),
            ("b-supp", &self.b_supp),
            ("d", &self.d),
            ("tau", &self.tau),
            ("delta", &self.delta),
            ("chi", &self.chi),
            ("transient", &self.transient),
            ("rho", &self.rho),
            ("dt", &self.dt),
            ("replicas", &self.replicas),
            ("x0", &self.x0),
            ("y0", &self.y0),
            ("scan", &self.scan),
            ("stride", &self.stride),
        ];
        let mut raw = RawConfig::default();
        for (k, v) in pairs {
            if let Some(v) = v {
                raw.set(k, v.clone());
            }
        }
        raw
    }
}

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<grazesim::Error> for CliError {
    fn from(e: grazesim::Error) -> Self {
        use grazesim::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::Domain(_)
            | E::DegenerateParameters(_)
            | E::DegenerateGrazing(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut raw = match &cli.opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    raw = raw.merge(cli.opts.flags());
    let env_seed = std::env::var("GRAZESIM_SEED").ok();
    let cfg = RunConfig::resolve(&raw, env_seed.as_deref())?;

    if let Some(path) = &cli.opts.dump_config {
        // pin the resolved seed so the dump reproduces without the environment
        let mut effective = raw.clone();
        effective.set("seed", cfg.seed.to_string());
        std::fs::write(path, effective.dump())?;
    }

    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }

    let mut buf = Vec::new();
    match cli.command {
        Command::OscParams => commands::osc_params(&cfg, &mut buf)?,
        Command::Bifdiag => commands::bifdiag(&cfg, &mut buf)?,
        Command::Density => commands::density(&cfg, &mut buf)?,
        Command::Sigma => commands::sigma(&cfg, &mut buf)?,
        Command::Orbit => commands::orbit(&cfg, &mut buf)?,
        Command::Compare => commands::compare(&cfg, &mut buf)?,
        Command::SampleFr => commands::sample_fr(&cfg, &mut buf)?,
    }
    match &cfg.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grazesim: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
