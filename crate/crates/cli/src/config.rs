//! Run configuration: a flat `key = value` file merged with command-line
//! flags (flags win), resolved into typed settings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use grazesim::analysis::{epsilon_for_alpha, MapVariant, DEFAULT_NU, DEFAULT_TRANSIENT};
use grazesim::integrator::NoiseMode;
use grazesim::oscillator::{OscillatorParams, Reduction};
use grazesim::NordmarkParams;

/// Every key accepted in a config file or as a `--key` flag.
pub const KEYS: &[&str] = &[
    "model",
    "mu",
    "F",
    "alpha",
    "eps",
    "nu",
    "seed",
    "n",
    "grid",
    "mu-min",
    "mu-max",
    "mu-steps",
    "out",
    "threads",
    "k-osc",
    "b-osc",
    "k-supp",
    "b-supp",
    "d",
    "tau",
    "delta",
    "chi",
    "transient",
    "rho",
    "dt",
    "replicas",
    "x0",
    "y0",
    "scan",
    "stride",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Raw settings as strings, keyed by flag name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(pub BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return err(format!("line {}: expected key = value", i + 1));
            };
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return err(format!("line {}: unknown key '{k}'", i + 1));
            }
            map.insert(k.to_string(), v.to_string());
        }
        Ok(Self(map))
    }

    /// Overlay `other` on top of `self`.
    pub fn merge(mut self, other: RawConfig) -> Self {
        self.0.extend(other.0);
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn dump(&self) -> String {
        let mut out = String::from("# effective grazesim configuration\n");
        for (k, v) in &self.0 {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => err(format!("{key}: expected a finite number, got '{s}'")),
            },
        }
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    /// Non-negative integer; scientific notation such as `1e6` is accepted.
    fn count(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => {
                if let Ok(v) = s.parse::<usize>() {
                    return Ok(Some(v));
                }
                match s.parse::<f64>() {
                    Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e18 => Ok(Some(v as usize)),
                    _ => err(format!("{key}: expected a non-negative integer, got '{s}'")),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Map(MapVariant),
    Ode(NoiseMode),
}

impl Model {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "det" => Model::Map(MapVariant::Det),
            "n1" => Model::Map(MapVariant::N1),
            "n2" => Model::Map(MapVariant::N2),
            "n3" => Model::Map(MapVariant::N3),
            "ode-none" => Model::Ode(NoiseMode::None),
            "ode-switching" => Model::Ode(NoiseMode::SwitchingOu),
            "ode-impact-ou" => Model::Ode(NoiseMode::ImpactOu),
            "ode-impact-white" => Model::Ode(NoiseMode::ImpactWhite),
            _ => return err(format!("unknown model '{s}'")),
        })
    }

    /// Index of the matching stochastic map, for the noise calibration.
    pub fn noise_index(self) -> Option<u8> {
        match self {
            Model::Map(v) => v.index(),
            Model::Ode(NoiseMode::None) => None,
            Model::Ode(NoiseMode::SwitchingOu) => Some(1),
            Model::Ode(NoiseMode::ImpactOu) => Some(2),
            Model::Ode(NoiseMode::ImpactWhite) => Some(3),
        }
    }

    pub fn map_variant(self) -> MapVariant {
        match self {
            Model::Map(v) => v,
            Model::Ode(_) => match self.noise_index() {
                Some(1) => MapVariant::N1,
                Some(2) => MapVariant::N2,
                Some(3) => MapVariant::N3,
                _ => MapVariant::Det,
            },
        }
    }

    pub fn ode_mode(self) -> NoiseMode {
        match self {
            Model::Ode(m) => m,
            Model::Map(v) => match v {
                MapVariant::Det => NoiseMode::None,
                MapVariant::N1 => NoiseMode::SwitchingOu,
                MapVariant::N2 => NoiseMode::ImpactOu,
                MapVariant::N3 => NoiseMode::ImpactWhite,
            },
        }
    }
}

/// The bifurcation parameter as given: directly as `μ` or as a forcing
/// amplitude `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Mu(f64),
    Forcing(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub osc: OscillatorParams,
    /// `(τ, δ, χ)` given directly, overriding the oscillator's.
    pub direct: Option<(f64, f64, i8)>,
    pub drive: Option<Drive>,
    pub eps: f64,
    pub alpha: Option<f64>,
    pub nu: f64,
    pub seed: u64,
    pub n: Option<usize>,
    pub grid: (usize, usize),
    pub mu_range: (f64, f64, usize),
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub transient: usize,
    pub rho: Option<f64>,
    pub dt: f64,
    pub replicas: usize,
    pub start: (f64, f64),
    pub cold_scan: bool,
    pub stride: usize,
}

impl RunConfig {
    /// Resolve raw settings. `env_seed` is the fallback when no seed is set.
    pub fn resolve(raw: &RawConfig, env_seed: Option<&str>) -> Result<Self, ConfigError> {
        let model = Model::parse(raw.get("model").unwrap_or("det"))?;
        let osc = OscillatorParams {
            k_osc: raw.f64_or("k-osc", 4.5)?,
            b_osc: raw.f64_or("b-osc", 0.3)?,
            k_supp: raw.f64_or("k-supp", 10.0)?,
            b_supp: raw.f64_or("b-supp", 0.0)?,
            d: raw.f64_or("d", 0.1)?,
            forcing: 0.0,
        };
        let mut osc = osc;
        osc.forcing = osc.grazing_forcing();

        let direct = match (raw.f64("tau")?, raw.f64("delta")?, raw.get("chi")) {
            (None, None, None) => None,
            (Some(t), Some(d), Some(c)) => {
                let chi = match c {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    _ => return err(format!("chi must be 1 or -1, got '{c}'")),
                };
                Some((t, d, chi))
            }
            _ => return err("tau, delta and chi must be given together"),
        };

        let drive = match (raw.f64("mu")?, raw.f64("F")?) {
            (Some(_), Some(_)) => return err("give exactly one of mu and F"),
            (Some(mu), None) => Some(Drive::Mu(mu)),
            (None, Some(f)) => {
                if direct.is_some() {
                    return err("F needs the oscillator parameters; use mu with tau/delta/chi");
                }
                Some(Drive::Forcing(f))
            }
            (None, None) => None,
        };

        let (eps, alpha) = match (raw.f64("eps")?, raw.f64("alpha")?) {
            (Some(_), Some(_)) => return err("eps and alpha are mutually exclusive"),
            (Some(e), None) if e < 0.0 => return err("eps must be non-negative"),
            (Some(e), None) => (e, None),
            (None, Some(a)) => {
                let eps = match model.noise_index() {
                    Some(j) => epsilon_for_alpha(j, a).map_err(|e| ConfigError(e.to_string()))?,
                    None => 0.0,
                };
                (eps, Some(a))
            }
            (None, None) => (0.0, None),
        };

        let nu = raw.f64_or("nu", DEFAULT_NU)?;
        if !(nu > 0.0) {
            return err("nu must be positive");
        }

        let seed_text = raw.get("seed").or(env_seed);
        let seed = match seed_text {
            None => 0,
            Some(s) => s.trim().parse::<u64>().map_err(|_| {
                ConfigError(format!("seed must be a non-negative integer, got '{s}'"))
            })?,
        };

        let grid = match raw.get("grid") {
            None => (256, 256),
            Some(g) => {
                let parse = |s: &str| {
                    s.trim()
                        .parse::<usize>()
                        .ok()
                        .filter(|&v| v > 0)
                        .ok_or_else(|| ConfigError(format!("grid: bad size '{g}'")))
                };
                match g.split_once('x') {
                    Some((a, b)) => (parse(a)?, parse(b)?),
                    None => {
                        let v = parse(g)?;
                        (v, v)
                    }
                }
            }
        };

        let mu_range = (
            raw.f64_or("mu-min", -0.01)?,
            raw.f64_or("mu-max", 0.05)?,
            raw.count("mu-steps")?.unwrap_or(601),
        );
        if mu_range.2 == 0 || mu_range.1 < mu_range.0 {
            return err("need mu-steps > 0 and mu-max >= mu-min");
        }

        let dt = raw.f64_or("dt", 1e-3)?;
        if !(dt > 0.0) {
            return err("dt must be positive");
        }
        let replicas = raw.count("replicas")?.unwrap_or(1);
        if replicas == 0 {
            return err("replicas must be positive");
        }
        let cold_scan = match raw.get("scan").unwrap_or("warm") {
            "warm" => false,
            "cold" => true,
            s => return err(format!("scan must be warm or cold, got '{s}'")),
        };
        let threads = raw.count("threads")?;
        if threads == Some(0) {
            return err("threads must be positive");
        }

        Ok(Self {
            model,
            osc,
            direct,
            drive,
            eps,
            alpha,
            nu,
            seed,
            n: raw.count("n")?,
            grid,
            mu_range,
            out: raw.get("out").map(PathBuf::from),
            threads,
            transient: raw.count("transient")?.unwrap_or(DEFAULT_TRANSIENT),
            rho: raw.f64("rho")?,
            dt,
            replicas,
            start: (raw.f64_or("x0", 0.0)?, raw.f64_or("y0", 0.0)?),
            cold_scan,
            stride: raw.count("stride")?.unwrap_or(10),
        })
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }

    /// `μ` of the run, converting from `F` through the oscillator if needed.
    pub fn mu(&self, red: &Reduction) -> Result<f64, ConfigError> {
        match self.drive {
            Some(Drive::Mu(mu)) => Ok(mu),
            Some(Drive::Forcing(f)) => Ok(red.mu_from_eta(f - self.osc.grazing_forcing())),
            None => err("this command needs mu or F"),
        }
    }

    /// Oscillator with its forcing set for the run.
    pub fn forced_oscillator(&self, red: &Reduction) -> Result<OscillatorParams, ConfigError> {
        let f = match self.drive {
            Some(Drive::Forcing(f)) => f,
            Some(Drive::Mu(mu)) => self.osc.grazing_forcing() + red.eta_from_mu(mu),
            None => return err("this command needs mu or F"),
        };
        Ok(self.osc.with_forcing(f))
    }

    /// Normal-form parameters, direct ones taking precedence.
    pub fn normal_form(&self, red: &Reduction, mu: f64) -> NordmarkParams {
        match self.direct {
            Some((tau, delta, chi)) => NordmarkParams {
                tau,
                delta,
                chi,
                mu,
            },
            None => red.normal_form_params(mu),
        }
    }
}
