use thiserror::Error;

/// Errors raised by the map, noise, oscillator and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value produced by map step: ({x}, {y})")]
    NumericOverflow { x: f64, y: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("degenerate grazing: {0}")]
    DegenerateGrazing(String),

    #[error("noise draw xi = {xi} reaches the pole of the impact coefficient at betaR = {beta_r}")]
    InvalidNoiseDraw { xi: f64, beta_r: f64 },

    #[error("invalid first-return sample (r, h) = ({r}, {h}); both must be positive")]
    InvalidSample { r: f64, h: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("sampler setup failed: {0}")]
    SamplerSetup(String),

    #[error("chattering: {events} switching events within one time unit near t = {t} (u = {u}, v = {v})")]
    Chattering {
        t: f64,
        u: f64,
        v: f64,
        events: usize,
    },

    #[error("no return to x > 0 within {cap} iterations")]
    Starvation { cap: usize },

    #[error("cluster {cluster} received no points")]
    DegenerateClustering { cluster: usize },

    #[error("orbit diverged at mu = {mu} after {iterations} iterations")]
    Divergent { mu: f64, iterations: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
