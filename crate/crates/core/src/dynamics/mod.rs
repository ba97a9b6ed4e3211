//! Mass-action vector fields and tempered differential-inclusion trajectories.

pub mod export;
pub mod rk;
pub mod steady;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::network::{ReactionNetwork, Tempering};
use crate::stoich::StoichiometryInfo;

pub use rk::StepControl;
pub use steady::{find_steady_state, SteadyOptions, SteadyState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("state must be strictly positive for fractional or negative exponents")]
    NonPositiveState,
    #[error("rates must be positive and one per reaction")]
    BadRates,
    #[error("state has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("invalid tolerances")]
    BadTolerances,
    #[error("end time must be positive")]
    BadEndTime,
    #[error("fixed rates lie outside the tempering")]
    RatesOutsideTempering,
    #[error("no steady state found (best residual {residual:e})")]
    NoConvergence { best: Vec<f64>, residual: f64 },
}

/// Precomputed mass-action field `Σ_r k_r x^{y_r} (y'_r - y_r)`.
#[derive(Debug, Clone)]
pub struct MassAction {
    n: usize,
    sources: Vec<Vec<f64>>,
    fluxes: Vec<Vec<f64>>,
    /// Exponents as small nonnegative integers, when they all are.
    integer: Vec<Option<Vec<i32>>>,
}

impl MassAction {
    pub fn new(net: &ReactionNetwork) -> Self {
        let fl = net.to_float();
        let integer = fl
            .sources
            .iter()
            .map(|y| {
                y.iter()
                    .map(|&e| (e >= 0.0 && e.fract() == 0.0 && e <= 64.0).then_some(e as i32))
                    .collect::<Option<Vec<i32>>>()
            })
            .collect();
        Self { n: fl.n_species, sources: fl.sources, fluxes: fl.fluxes, integer }
    }

    pub fn n_species(&self) -> usize {
        self.n
    }

    pub fn n_reactions(&self) -> usize {
        self.sources.len()
    }

    pub fn fluxes(&self) -> &[Vec<f64>] {
        &self.fluxes
    }

    pub fn sources(&self) -> &[Vec<f64>] {
        &self.sources
    }

    /// `x^{y_r}`.
    pub fn monomial(&self, r: usize, x: &[f64]) -> Result<f64, DynamicsError> {
        if let Some(ex) = &self.integer[r] {
            return Ok(ex.iter().zip(x).map(|(&e, &xi)| if e == 0 { 1.0 } else { xi.powi(e) }).product());
        }
        let mut s = 0.0;
        for (&e, &xi) in self.sources[r].iter().zip(x) {
            if e == 0.0 {
                continue;
            }
            if xi <= 0.0 {
                return Err(DynamicsError::NonPositiveState);
            }
            s += e * xi.ln();
        }
        Ok(s.exp())
    }

    pub fn eval_into(&self, k: &[f64], x: &[f64], out: &mut [f64]) -> Result<(), DynamicsError> {
        out.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..self.sources.len() {
            let rate = k[r] * self.monomial(r, x)?;
            if rate == 0.0 {
                continue;
            }
            for (o, f) in out.iter_mut().zip(&self.fluxes[r]) {
                *o += rate * f;
            }
        }
        Ok(())
    }

    pub fn eval(&self, k: &[f64], x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
        self.check(k, x)?;
        let mut out = vec![0.0; self.n];
        self.eval_into(k, x, &mut out)?;
        Ok(out)
    }

    /// Jacobian `∂f_i/∂x_j` (row-major, n x n); requires `x > 0`.
    pub fn jacobian(&self, k: &[f64], x: &[f64]) -> Result<Vec<Vec<f64>>, DynamicsError> {
        let mut j = vec![vec![0.0; self.n]; self.n];
        for r in 0..self.sources.len() {
            let m = k[r] * self.monomial(r, x)?;
            for (c, (&e, &xc)) in self.sources[r].iter().zip(x).enumerate() {
                if e == 0.0 {
                    continue;
                }
                let d = m * e / xc;
                for (i, f) in self.fluxes[r].iter().enumerate() {
                    j[i][c] += d * f;
                }
            }
        }
        Ok(j)
    }

    fn check(&self, k: &[f64], x: &[f64]) -> Result<(), DynamicsError> {
        if x.len() != self.n {
            return Err(DynamicsError::Length { expected: self.n, found: x.len() });
        }
        if k.len() != self.sources.len() || k.iter().any(|&v| !(v > 0.0)) {
            return Err(DynamicsError::BadRates);
        }
        Ok(())
    }
}

/// `Σ_r k_r x^{source_r} (target_r - source_r)`.
pub fn mass_action_rhs(net: &ReactionNetwork, k: &[f64], x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    MassAction::new(net).eval(k, x)
}

/// How rate constants are chosen from the tempering over time.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum RatePolicy {
    ConstantMid,
    ConstantSampled { seed: u64 },
    /// Resampled uniformly from each interval at multiples of `dt`.
    PiecewiseConstant { dt: f64, seed: u64 },
    Fixed { k: Vec<f64> },
}

impl RatePolicy {
    pub fn seed(&self) -> Option<u64> {
        match self {
            RatePolicy::ConstantSampled { seed } | RatePolicy::PiecewiseConstant { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

fn sample_rates<R: Rng>(tempering: &Tempering, rng: &mut R) -> Vec<f64> {
    tempering
        .intervals()
        .iter()
        .map(|i| if i.lo == i.hi { i.lo } else { rng.random_range(i.lo..=i.hi) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSegment {
    pub t_start: f64,
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    BoundaryApproach { t: f64, state: Vec<f64> },
    EnteredSet { t: f64 },
    LeftSet { t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub rate_log: Vec<RateSegment>,
    pub events: Vec<Event>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.times.last().expect("nonempty"), self.states.last().expect("nonempty"))
    }

    /// Rates in force at time `t`.
    pub fn rates_at(&self, t: f64) -> &[f64] {
        let idx = self.rate_log.partition_point(|s| s.t_start <= t).saturating_sub(1);
        &self.rate_log[idx].rates
    }

    pub fn hit_boundary(&self) -> bool {
        self.events.iter().any(|e| matches!(e, Event::BoundaryApproach { .. }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub control: StepControl,
    /// Box `[lo, hi]` whose entries and exits are logged.
    pub monitor: Option<(Vec<f64>, Vec<f64>)>,
    /// Record at most one state per this much time (0 records every step).
    pub record_dt: f64,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self { control: StepControl::default(), monitor: None, record_dt: 0.0 }
    }
}

/// Integrates one trajectory of the mass-action differential inclusion,
/// with rates selected by `policy` from `tempering`.
pub fn simulate(
    net: &ReactionNetwork,
    tempering: &Tempering,
    policy: &RatePolicy,
    x0: &[f64],
    t_end: f64,
    opts: &SimulateOptions,
) -> Result<Trajectory, DynamicsError> {
    let field = MassAction::new(net);
    let n = field.n_species();
    if x0.len() != n {
        return Err(DynamicsError::Length { expected: n, found: x0.len() });
    }
    if x0.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(DynamicsError::NonPositiveState);
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(DynamicsError::BadEndTime);
    }
    let ctl = opts.control;
    if !(ctl.rtol > 0.0 && ctl.atol >= 0.0 && ctl.h_min > 0.0 && ctl.h_init > 0.0 && ctl.h_max > 0.0) {
        return Err(DynamicsError::BadTolerances);
    }
    if tempering.len() != field.n_reactions() {
        return Err(DynamicsError::BadRates);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed().unwrap_or(0));
    let (first, dt) = match policy {
        RatePolicy::ConstantMid => (tempering.midpoints(), f64::INFINITY),
        RatePolicy::ConstantSampled { .. } => (sample_rates(tempering, &mut rng), f64::INFINITY),
        RatePolicy::PiecewiseConstant { dt, .. } => {
            if !(*dt > 0.0) {
                return Err(DynamicsError::BadTolerances);
            }
            (sample_rates(tempering, &mut rng), *dt)
        }
        RatePolicy::Fixed { k } => {
            if !tempering.contains(k) {
                return Err(DynamicsError::RatesOutsideTempering);
            }
            (k.clone(), f64::INFINITY)
        }
    };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        rate_log: vec![RateSegment { t_start: 0.0, rates: first }],
        events: Vec::new(),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let inside = |x: &[f64]| {
        opts.monitor.as_ref().map(|(lo, hi)| x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h))
    };
    let mut was_inside = inside(x0);
    let mut t = 0.0;
    let mut y = x0.to_vec();
    let mut h = ctl.h_init;
    let mut last_recorded = 0.0;
    let mut segment = 0usize;
    'segments: while t < t_end {
        let seg_end = ((segment + 1) as f64 * dt).min(t_end);
        let k = traj.rate_log.last().expect("rates").rates.clone();
        let mut f = |_t: f64, x: &[f64], out: &mut [f64]| field.eval_into(&k, x, out).is_ok();
        let mut k1 = vec![0.0; n];
        if !f(t, &y, &mut k1) {
            return Err(DynamicsError::NonPositiveState);
        }
        while t < seg_end {
            if traj.accepted_steps + traj.rejected_steps >= ctl.max_steps {
                break 'segments;
            }
            let step = h.min(seg_end - t);
            match rk::attempt(&mut f, t, &y, &k1, step, &ctl) {
                rk::Attempt::Accepted { y: y_new, k_last, h_next } => {
                    traj.accepted_steps += 1;
                    // land exactly on the segment end to avoid slivers
                    t = if seg_end - (t + step) <= 1e-12 * seg_end.max(1.0) { seg_end } else { t + step };
                    y = y_new;
                    k1 = k_last;
                    if step == h {
                        h = h_next;
                    }
                    if t - last_recorded >= opts.record_dt || t >= t_end {
                        traj.times.push(t);
                        traj.states.push(y.clone());
                        last_recorded = t;
                    }
                    let now = inside(&y);
                    match (was_inside, now) {
                        (Some(false), Some(true)) => traj.events.push(Event::EnteredSet { t }),
                        (Some(true), Some(false)) => traj.events.push(Event::LeftSet { t }),
                        _ => {}
                    }
                    was_inside = now;
                }
                rk::Attempt::Rejected { h_next } => {
                    traj.rejected_steps += 1;
                    h = h_next;
                    if h < ctl.h_min {
                        if traj.times.last() != Some(&t) {
                            traj.times.push(t);
                            traj.states.push(y.clone());
                        }
                        traj.events.push(Event::BoundaryApproach { t, state: y.clone() });
                        break 'segments;
                    }
                }
            }
        }
        segment += 1;
        if t < t_end {
            let rates = sample_rates(tempering, &mut rng);
            traj.rate_log.push(RateSegment { t_start: t, rates });
        }
    }
    Ok(traj)
}

/// Per-trajectory seeds derived from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.random()
}

/// `max_t ‖A(x(t) - x(0))‖` over recorded states.
pub fn conservation_residual(traj: &Trajectory, stoich: &StoichiometryInfo) -> f64 {
    let x0 = &traj.states[0];
    traj.states.iter().map(|x| stoich.conservation_defect(x, x0)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovSample {
    pub t: f64,
    pub g: f64,
    pub dg_dt: f64,
}

/// `g(x(t))` with `α = 1` and `dg/dt = <log x, f(x)>` under the rates in force.
pub fn g_along(traj: &Trajectory, net: &ReactionNetwork) -> Result<Vec<LyapunovSample>, DynamicsError> {
    g_along_alpha(traj, net, &vec![1.0; net.n_species()])
}

/// As [`g_along`] for a general base point `α`.
pub fn g_along_alpha(traj: &Trajectory, net: &ReactionNetwork, alpha: &[f64]) -> Result<Vec<LyapunovSample>, DynamicsError> {
    let field = MassAction::new(net);
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, x)| {
            let f = field.eval(traj.rates_at(t), x)?;
            let mut g = 0.0;
            let mut dg = 0.0;
            for i in 0..x.len() {
                let l = (x[i] / alpha[i]).ln();
                g += x[i] * l - x[i];
                dg += l * f[i];
            }
            Ok(LyapunovSample { t, g, dg_dt: dg })
        })
        .collect()
}
