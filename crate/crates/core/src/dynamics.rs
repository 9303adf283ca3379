//! Replicator dynamics of the two populations and a fixed-step RK4
//! integrator for them.
//!
//! ```text
//! dx/dt = x (1 - x) dX        dX: manufacturer payoff difference
//! dy/dt = y (1 - y) dY        dY: consumer payoff difference
//! ```
//!
//! One time unit is one month.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nev_model::{
    delta_consumer_feedback, delta_consumer_no_feedback, delta_manufacturer, delta_manufacturer_feedback,
    retained_expectation,
};
use crate::params::ModelParams;
use crate::state::{GameState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub step_size: f64,
    pub horizon: f64,
    pub convergence_epsilon: f64,
    pub convergence_window: usize,
    pub clamp: bool,
    /// Horizon multiplier used by [`long_run_limit`].
    pub long_run_factor: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_size: 0.01,
            horizon: 600.0,
            convergence_epsilon: 1e-8,
            convergence_window: 100,
            clamp: true,
            long_run_factor: 10.0,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Integrator(m.to_string()));
        if !(self.step_size.is_finite() && self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return bad("horizon must be positive");
        }
        if self.step_size > self.horizon {
            return bad("step_size exceeds horizon");
        }
        if !(self.convergence_epsilon.is_finite() && self.convergence_epsilon > 0.0) {
            return bad("convergence_epsilon must be positive");
        }
        if self.convergence_window == 0 {
            return bad("convergence_window must be at least 1");
        }
        if !(self.long_run_factor.is_finite() && self.long_run_factor >= 1.0) {
            return bad("long_run_factor must be at least 1");
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step_size).round().max(1.0) as usize
    }
}

/// Payoff differences `(dX, dY)` at a state, with or without feedback.
pub fn advantages(p: &ModelParams, s: &GameState) -> (f64, f64) {
    if p.feedback {
        let dy = delta_consumer_feedback(p, s).expect("feedback enabled");
        (delta_manufacturer_feedback(p, s), dy)
    } else {
        (delta_manufacturer(p), delta_consumer_no_feedback(p))
    }
}

pub fn rhs(p: &ModelParams, s: &GameState) -> (f64, f64) {
    let (dx, dy) = advantages(p, s);
    (s.x * (1.0 - s.x) * dx, s.y * (1.0 - s.y) * dy)
}

/// Axes along which the payoff difference is identically zero for these
/// parameters. A share on such an axis never moves, so it is frozen rather
/// than attracted anywhere.
pub fn neutral_axes(p: &ModelParams) -> (bool, bool) {
    if p.feedback {
        let coupling = p.coupling_lambda * p.esdg.delta * p.consumer.info_total();
        let x_neutral = delta_manufacturer(p) == 0.0 && coupling == 0.0;
        let y_neutral = p.consumer.insurance == 0.0
            && retained_expectation(p) == 0.0
            && delta_consumer_no_feedback(p) == 0.0;
        (x_neutral, y_neutral)
    } else {
        (delta_manufacturer(p) == 0.0, delta_consumer_no_feedback(p) == 0.0)
    }
}

fn rk4_step(p: &ModelParams, s: &GameState, k1: (f64, f64), h: f64) -> (f64, f64) {
    let at = |dx: f64, dy: f64| rhs(p, &GameState::new(s.x + dx, s.y + dy, s.t));
    let k2 = at(0.5 * h * k1.0, 0.5 * h * k1.1);
    let k3 = at(0.5 * h * k2.0, 0.5 * h * k2.1);
    let k4 = at(h * k3.0, h * k3.1);
    (
        s.x + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        s.y + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    )
}

struct RunStats {
    converged: bool,
    convergence_time: Option<f64>,
    clamped_steps: usize,
}

/// Drives the integrator, handing every sample and its field to `sink`.
fn drive(
    p: &ModelParams,
    initial: &GameState,
    cfg: &IntegratorConfig,
    steps: usize,
    mut sink: impl FnMut(&GameState),
) -> Result<RunStats> {
    cfg.validate()?;
    if !initial.in_unit_square() {
        return Err(Error::Spec(format!("initial state ({}, {}) outside the unit square", initial.x, initial.y)));
    }
    let h = cfg.step_size;
    let mut state = *initial;
    let mut field = rhs(p, &state);
    let mut run = 0usize;
    let mut convergence_time = None;
    let mut clamped_steps = 0;

    for i in 0..=steps {
        sink(&state);
        if field.0.abs().max(field.1.abs()) < cfg.convergence_epsilon {
            run += 1;
            if run == cfg.convergence_window && convergence_time.is_none() {
                convergence_time = Some(initial.t + (i + 1 - run) as f64 * h);
            }
        } else {
            run = 0;
        }
        if i == steps {
            break;
        }
        let (mut x, mut y) = rk4_step(p, &state, field, h);
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::NonFiniteState { step: i + 1, x, y });
        }
        if cfg.clamp {
            let (cx, cy) = (x.clamp(0.0, 1.0), y.clamp(0.0, 1.0));
            if cx != x || cy != y {
                clamped_steps += 1;
            }
            (x, y) = (cx, cy);
        }
        state = GameState::new(x, y, initial.t + (i + 1) as f64 * h);
        field = rhs(p, &state);
    }

    // A share frozen strictly inside (0, 1) by an identically zero payoff
    // difference has not converged to anything.
    let (nx, ny) = neutral_axes(p);
    let interior = |v: f64| v > 0.0 && v < 1.0;
    let frozen = (nx && interior(state.x)) || (ny && interior(state.y));
    let convergence_time = if frozen { None } else { convergence_time };
    Ok(RunStats { converged: convergence_time.is_some(), convergence_time, clamped_steps })
}

/// Classical fixed-step RK4 from `initial` over `cfg.horizon`, sampled at
/// every step, shares clamped into [0, 1] after each step when `cfg.clamp`.
///
/// Converged means the field magnitude `max(|dx/dt|, |dy/dt|)` stayed below
/// `convergence_epsilon` for `convergence_window` consecutive samples; the
/// convergence time is the first sample of that window.
pub fn integrate(p: &ModelParams, initial: &GameState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let mut samples = Vec::with_capacity(cfg.steps() + 1);
    let stats = drive(p, initial, cfg, cfg.steps(), |s| samples.push(*s))?;
    Ok(Trajectory {
        scenario_id: String::new(),
        step_size: cfg.step_size,
        samples,
        converged: stats.converged,
        convergence_time: stats.convergence_time,
        clamped_steps: stats.clamped_steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongRun {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub converged: bool,
    pub convergence_time: Option<f64>,
}

/// Final state after `long_run_factor` times the configured horizon.
/// Non-convergence is reported through `converged`, with the last state.
pub fn long_run_limit(p: &ModelParams, initial: &GameState, cfg: &IntegratorConfig) -> Result<LongRun> {
    let extended = IntegratorConfig { horizon: cfg.horizon * cfg.long_run_factor, ..*cfg };
    let mut last = *initial;
    let stats = drive(p, initial, &extended, extended.steps(), |s| last = *s)?;
    Ok(LongRun {
        x: last.x,
        y: last.y,
        t: last.t,
        converged: stats.converged,
        convergence_time: stats.convergence_time,
    })
}
