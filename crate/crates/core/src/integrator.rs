//! Fixed-step RK4 integration of the impact oscillator with located switching
//! events, optional noise, and extraction of returns to the section `v = 0`.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::noise::{ou_exact_step, OUParams};
use crate::oscillator::{grazing_phase, OscillatorParams, Reduction};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

impl FlowState {
    pub fn new(u: f64, v: f64, t: f64) -> Self {
        Self { u, v, t }
    }

    /// Point of the non-impacting steady state at time `t`.
    pub fn on_steady_state(p: &OscillatorParams, t: f64) -> Self {
        Self {
            u: crate::oscillator::steady_state(p, t),
            v: crate::oscillator::steady_state_velocity(p, t),
            t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseMode {
    /// Deterministic.
    None,
    /// Switching when `u + ξ` changes sign.
    SwitchingOu,
    /// `ξ` added to the acceleration while in contact.
    ImpactOu,
    /// White noise `ε dW` added to the velocity while in contact.
    ImpactWhite,
}

impl NoiseMode {
    pub fn name(self) -> &'static str {
        match self {
            NoiseMode::None => "none",
            NoiseMode::SwitchingOu => "switching_ou",
            NoiseMode::ImpactOu => "impact_ou",
            NoiseMode::ImpactWhite => "impact_white",
        }
    }

    fn has_ou(self) -> bool {
        matches!(self, NoiseMode::SwitchingOu | NoiseMode::ImpactOu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Free flight, `u < 0`.
    L,
    /// Contact with the support, `u > 0`.
    R,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::L => "L",
            Branch::R => "R",
        }
    }

    fn other(self) -> Branch {
        match self {
            Branch::L => Branch::R,
            Branch::R => Branch::L,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub event_tol: f64,
    pub noise_mode: NoiseMode,
    pub ou: OUParams,
    pub seed: u64,
    /// Record every `sample_stride`-th step and every event; 0 records nothing.
    pub sample_stride: usize,
    /// Chattering guard: maximum switching events per unit time.
    pub max_events_per_time: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            event_tol: 1e-12,
            noise_mode: NoiseMode::None,
            ou: OUParams { eps: 0.0, nu: 0.5 },
            seed: 0,
            sample_stride: 0,
            max_events_per_time: 10_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_noise(mut self, mode: NoiseMode, ou: OUParams) -> Self {
        self.noise_mode = mode;
        self.ou = ou;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "dt must be > 0, got {}",
                self.dt
            )));
        }
        if !(self.event_tol > 0.0 && self.event_tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "event_tol must be > 0, got {}",
                self.event_tol
            )));
        }
        OUParams::new(self.ou.eps, self.ou.nu)?;
        if self.max_events_per_time == 0 {
            return Err(Error::InvalidConfig(
                "max_events_per_time must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    Step,
    /// Switching located by bisection.
    Crossing,
    /// Switching caused by a jump of `ξ` at a grid node (switching_ou only).
    NoiseJump,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    /// Branch in force after this instant.
    pub branch: Branch,
    pub xi: f64,
    pub kind: SampleKind,
}

/// A point on the section `v = 0` with `v` decreasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionHit {
    pub t: f64,
    pub u: f64,
    /// True when obtained by continuing the free-flight field past contact.
    pub virtual_hit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub mode: NoiseMode,
    pub samples: Vec<Sample>,
    pub hits: Vec<SectionHit>,
    pub n_events: usize,
    pub end: FlowState,
    pub end_branch: Branch,
    pub end_xi: f64,
}

impl Trajectory {
    /// CSV with columns `t,u,v,branch,xi`; `xi` is empty when the mode has no
    /// coloured noise.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,u,v,branch,xi")?;
        for s in &self.samples {
            if self.mode.has_ou() {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{},{:.16e}",
                    s.t,
                    s.u,
                    s.v,
                    s.branch.name(),
                    s.xi
                )?;
            } else {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{},",
                    s.t,
                    s.u,
                    s.v,
                    s.branch.name()
                )?;
            }
        }
        Ok(())
    }
}

/// Right-hand side of the oscillator on one branch, `ξ` entering the contact
/// acceleration in impact_ou mode.
#[derive(Debug, Clone, Copy)]
struct Field {
    p: OscillatorParams,
}

impl Field {
    #[inline]
    fn accel(&self, b: Branch, t: f64, u: f64, v: f64, push: f64) -> f64 {
        let p = &self.p;
        let free = -p.k_osc * (u + 1.0) - p.b_osc * v + p.forcing * t.cos();
        match b {
            Branch::L => free,
            Branch::R => free - p.b_supp * v - p.k_supp * (u + p.d) + push,
        }
    }

    #[inline]
    fn rk4(&self, b: Branch, t: f64, u: f64, v: f64, h: f64, push: f64) -> (f64, f64) {
        let h2 = 0.5 * h;
        let k1u = v;
        let k1v = self.accel(b, t, u, v, push);
        let k2u = v + h2 * k1v;
        let k2v = self.accel(b, t + h2, u + h2 * k1u, v + h2 * k1v, push);
        let k3u = v + h2 * k2v;
        let k3v = self.accel(b, t + h2, u + h2 * k2u, v + h2 * k2v, push);
        let k4u = v + h * k3v;
        let k4v = self.accel(b, t + h, u + h * k3u, v + h * k3v, push);
        (
            u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        )
    }
}

/// Bisection for the root of `g` on `[lo, hi]` with `g(lo) ≤ 0 < g(hi)` (after
/// orienting). Returns the end of the final bracket past the root.
fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let rising = g(lo) <= 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (g(mid) > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

struct Integrator<'a, R: Rng + ?Sized> {
    field: Field,
    cfg: &'a IntegratorConfig,
    rng: &'a mut R,
    t: f64,
    u: f64,
    v: f64,
    branch: Branch,
    xi: f64,
    traj: Trajectory,
    window_start: f64,
    window_events: usize,
}

impl<'a, R: Rng + ?Sized> Integrator<'a, R> {
    /// Offset added to `u` in the switching function.
    fn shift(&self) -> f64 {
        match self.cfg.noise_mode {
            NoiseMode::SwitchingOu => self.xi,
            _ => 0.0,
        }
    }

    fn push(&self, b: Branch) -> f64 {
        match (self.cfg.noise_mode, b) {
            (NoiseMode::ImpactOu, Branch::R) => self.xi,
            _ => 0.0,
        }
    }

    fn branch_of(&self, u: f64) -> Branch {
        if u + self.shift() > 0.0 {
            Branch::R
        } else {
            Branch::L
        }
    }

    fn record(&mut self, kind: SampleKind) {
        self.traj.samples.push(Sample {
            t: self.t,
            u: self.u,
            v: self.v,
            branch: self.branch,
            xi: self.xi,
            kind,
        });
    }

    fn note_event(&mut self, kind: SampleKind) -> Result<()> {
        self.traj.n_events += 1;
        if self.t - self.window_start >= 1.0 {
            self.window_start = self.t;
            self.window_events = 0;
        }
        self.window_events += 1;
        if self.window_events > self.cfg.max_events_per_time {
            return Err(Error::Chattering {
                t: self.t,
                u: self.u,
                v: self.v,
                events: self.window_events,
            });
        }
        if self.cfg.sample_stride > 0 {
            self.record(kind);
        }
        Ok(())
    }

    /// On entering contact with `v > 0`, continue the free-flight field to
    /// `v = 0` and record that point as the section hit.
    fn virtual_hit(&mut self) {
        if self.v <= 0.0 {
            return;
        }
        let f = self.field;
        let h = self.cfg.dt;
        let (mut t, mut u, mut v) = (self.t, self.u, self.v);
        // the free-flight acceleration at the support is close to -1, so the
        // apex is reached after roughly v time units
        for _ in 0..1_000_000 {
            let (u1, v1) = f.rk4(Branch::L, t, u, v, h, 0.0);
            if v1 <= 0.0 {
                let tau = bisect(
                    |s| -f.rk4(Branch::L, t, u, v, s, 0.0).1,
                    0.0,
                    h,
                    self.cfg.event_tol,
                );
                let (ua, _) = f.rk4(Branch::L, t, u, v, tau, 0.0);
                self.traj.hits.push(SectionHit {
                    t: t + tau,
                    u: ua,
                    virtual_hit: true,
                });
                return;
            }
            t += h;
            u = u1;
            v = v1;
        }
    }

    fn switch_to(&mut self, b: Branch, kind: SampleKind) -> Result<()> {
        self.branch = b;
        self.note_event(kind)?;
        if b == Branch::R {
            self.virtual_hit();
        }
        Ok(())
    }

    /// Advance by `h` from the current state, splitting at switching events.
    fn step(&mut self, h: f64) -> Result<()> {
        let f = self.field;
        let tol = self.cfg.event_tol;
        let mut rem = h;
        let mut splits = 0;
        while rem > 0.0 {
            let b = self.branch;
            let push = self.push(b);
            let shift = self.shift();
            let (t0, u0, v0) = (self.t, self.u, self.v);
            let at = |s: f64| f.rk4(b, t0, u0, v0, s, push);
            // positive once the other branch should be in force
            let leave = |u: f64| match b {
                Branch::L => u + shift,
                Branch::R => -(u + shift),
            };
            let (u1, v1) = at(rem);

            // extremum within the sub-step: a maximum on L, a minimum on R
            let turning = match b {
                Branch::L => v0 > 0.0 && v1 <= 0.0,
                Branch::R => v0 < 0.0 && v1 >= 0.0,
            };
            let t_turn = if turning {
                let sgn = if b == Branch::L { -1.0 } else { 1.0 };
                Some(bisect(|s| sgn * at(s).1, 0.0, rem, tol))
            } else {
                None
            };

            let crossing = if leave(u1) > 0.0 {
                Some(bisect(|s| leave(at(s).0), 0.0, rem, tol))
            } else if let Some(tt) = t_turn {
                // grazing excursion that enters and leaves within one step
                if leave(at(tt).0) > 0.0 {
                    Some(bisect(|s| leave(at(s).0), 0.0, tt, tol))
                } else {
                    None
                }
            } else {
                None
            };

            if let (Branch::L, Some(tt)) = (b, t_turn) {
                if crossing.is_none_or(|tc| tt < tc) {
                    self.traj.hits.push(SectionHit {
                        t: t0 + tt,
                        u: at(tt).0,
                        virtual_hit: false,
                    });
                }
            }

            let tau = crossing.unwrap_or(rem);
            let (u, mut v) = if crossing.is_some() {
                at(tau)
            } else {
                (u1, v1)
            };
            if b == Branch::R && self.cfg.noise_mode == NoiseMode::ImpactWhite {
                let z: f64 = self.rng.sample(StandardNormal);
                v += self.cfg.ou.eps * tau.sqrt() * z;
            }
            if !(u.is_finite() && v.is_finite()) {
                return Err(Error::NumericOverflow { x: u, y: v });
            }
            if crossing.is_some() && tau >= rem {
                // crossing resolved onto the step end
                rem = 0.0;
            } else {
                rem -= tau;
            }
            self.t = t0 + tau;
            self.u = u;
            self.v = v;
            if crossing.is_some() {
                self.switch_to(b.other(), SampleKind::Crossing)?;
                splits += 1;
                if splits > 1000 {
                    return Err(Error::Chattering {
                        t: self.t,
                        u: self.u,
                        v: self.v,
                        events: splits,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Integrate from `s0` until `t_end`.
pub fn integrate<R: Rng + ?Sized>(
    p: &OscillatorParams,
    cfg: &IntegratorConfig,
    s0: FlowState,
    t_end: f64,
    rng: &mut R,
) -> Result<Trajectory> {
    integrate_from(p, cfg, s0, None, t_end, rng)
}

/// As [`integrate`], optionally resuming with a given `ξ`.
pub fn integrate_from<R: Rng + ?Sized>(
    p: &OscillatorParams,
    cfg: &IntegratorConfig,
    s0: FlowState,
    xi0: Option<f64>,
    t_end: f64,
    rng: &mut R,
) -> Result<Trajectory> {
    cfg.validate()?;
    p.validate()?;
    if !(s0.u.is_finite() && s0.v.is_finite() && s0.t.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidConfig(
            "initial state and end time must be finite".into(),
        ));
    }
    let mode = cfg.noise_mode;
    let xi = match (mode.has_ou(), xi0) {
        (false, _) => 0.0,
        (true, Some(x)) => x,
        (true, None) => cfg.ou.sample_stationary(rng),
    };
    let mut it = Integrator {
        field: Field { p: *p },
        cfg,
        rng,
        t: s0.t,
        u: s0.u,
        v: s0.v,
        branch: Branch::L,
        xi,
        traj: Trajectory {
            mode,
            samples: Vec::new(),
            hits: Vec::new(),
            n_events: 0,
            end: s0,
            end_branch: Branch::L,
            end_xi: xi,
        },
        window_start: s0.t,
        window_events: 0,
    };
    it.branch = it.branch_of(s0.u);
    if cfg.sample_stride > 0 {
        it.record(SampleKind::Step);
    }

    let n_steps = ((t_end - s0.t) / cfg.dt).ceil().max(0.0) as u64;
    for n in 0..n_steps {
        let t_next = if n + 1 == n_steps {
            t_end
        } else {
            s0.t + (n + 1) as f64 * cfg.dt
        };
        let h = t_next - it.t;
        if h > 0.0 {
            it.step(h)?;
        }
        it.t = t_next;
        if mode.has_ou() {
            it.xi = ou_exact_step(it.xi, cfg.dt, &cfg.ou, it.rng);
            if mode == NoiseMode::SwitchingOu {
                let want = it.branch_of(it.u);
                if want != it.branch {
                    it.switch_to(want, SampleKind::NoiseJump)?;
                }
            }
        }
        if cfg.sample_stride > 0 && (n + 1) % cfg.sample_stride as u64 == 0 {
            it.record(SampleKind::Step);
        }
    }

    let mut traj = it.traj;
    traj.end = FlowState {
        u: it.u,
        v: it.v,
        t: it.t,
    };
    traj.end_branch = it.branch;
    traj.end_xi = it.xi;
    Ok(traj)
}

/// Phase `w = (t mod 2π) − t_graz`, wrapped into `[−π, π)`.
pub fn phase(t: f64, t_graz: f64) -> f64 {
    let w = t.rem_euclid(2.0 * PI) - t_graz;
    (w + PI).rem_euclid(2.0 * PI) - PI
}

/// Section hits as `(u, w)` pairs.
pub fn poincare_returns(traj: &Trajectory, p: &OscillatorParams) -> Vec<(f64, f64)> {
    let tg = grazing_phase(p);
    traj.hits.iter().map(|h| (h.u, phase(h.t, tg))).collect()
}

/// Integrate until `n + transient` section hits have been collected and return
/// the last `n` in normal-form coordinates `(x, y)`.
pub fn ode_return_points<R: Rng + ?Sized>(
    p: &OscillatorParams,
    cfg: &IntegratorConfig,
    n: usize,
    transient: usize,
    rng: &mut R,
) -> Result<Vec<(f64, f64)>> {
    let red = Reduction::new(p)?;
    let eta = p.eta();
    let want = n + transient;
    let chunk = 2.0 * PI * 64.0;
    // one hit per forcing period near the grazing orbit; bound the effort
    let max_time = 2.0 * PI * (4 * want + 1000) as f64;

    let mut state = FlowState::on_steady_state(p, 0.0);
    let mut xi = None;
    let mut hits = Vec::with_capacity(want);
    let mut chunk_cfg = *cfg;
    chunk_cfg.sample_stride = 0;
    while hits.len() < want {
        if state.t > max_time {
            return Err(Error::Starvation { cap: want });
        }
        let traj = integrate_from(p, &chunk_cfg, state, xi, state.t + chunk, rng)?;
        hits.extend(poincare_returns(&traj, p));
        state = traj.end;
        xi = Some(traj.end_xi);
    }
    Ok(hits[transient..want]
        .iter()
        .map(|&(u, w)| {
            let (x, y, _) = red.to_normal_form(u, w, eta);
            (x, y)
        })
        .collect())
}
