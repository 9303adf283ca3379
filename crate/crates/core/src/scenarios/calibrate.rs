//! Least-squares fit of free parameters to observed adoption shares.
//!
//! Nelder–Mead runs in the unit box `[0, 1]^n` mapped affinely onto the
//! parameter bounds, restarted from Latin-hypercube seeds.

use std::cell::Cell;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, IntegratorConfig};
use crate::error::{Error, Result};
use crate::nev_model::delta_manufacturer;
use crate::params::{resolve_field, ModelParams};
use crate::state::Trajectory;

use super::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeParameter {
    pub parameter: String,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    pub t: f64,
    pub observable: Observable,
    pub target: f64,
    #[serde(default = "default_weight")]
    pub weight: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_weight() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    0.015
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpec {
    #[serde(default)]
    pub free: Vec<FreeParameter>,
    #[serde(default)]
    pub anchors: Vec<Anchor>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Loss evaluations allowed per restart.
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations: usize,
}

fn default_restarts() -> usize {
    20
}

fn default_seed() -> u64 {
    20_210_601
}

fn default_max_evaluations() -> usize {
    1500
}

impl CalibrationSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if self.free.is_empty() {
            return bad("calibration needs at least one free parameter".into());
        }
        if self.anchors.is_empty() {
            return bad("calibration needs at least one anchor".into());
        }
        if self.restarts == 0 || self.max_evaluations == 0 {
            return bad("restarts and max_evaluations must be positive".into());
        }
        let mut seen = Vec::new();
        for f in &self.free {
            let path = resolve_field(&f.parameter)?;
            if seen.contains(&path) {
                return Err(Error::DuplicateField(path.to_string()));
            }
            seen.push(path);
            if !(f.lower.is_finite() && f.upper.is_finite() && f.lower < f.upper) {
                return bad(format!("bounds of `{}` must be finite with lower < upper", f.parameter));
            }
        }
        for a in &self.anchors {
            if !a.t.is_finite() || !(0.0..=1.0).contains(&a.target) {
                return bad(format!("anchor at t = {} needs a finite time and a target in [0, 1]", a.t));
            }
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return bad(format!("anchor weight {} must be finite and non-negative", a.weight));
            }
            if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
                return bad(format!("anchor tolerance {} must be finite and non-negative", a.tolerance));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorResidual {
    pub t: f64,
    pub observable: Observable,
    pub target: f64,
    pub fitted: f64,
    /// `fitted - target`
    pub residual: f64,
    pub tolerance: f64,
    pub within: bool,
}

/// How the fitted manufacturer share can rest strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteriorMechanism {
    /// Nonzero `coupling_lambda` ties the manufacturer difference to `y`.
    Coupling,
    /// Manufacturer difference identically zero.
    KnifeEdge,
    /// Neither; the manufacturer share can only settle at 0 or 1.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedValue {
    pub parameter: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub params: ModelParams,
    pub values: Vec<FittedValue>,
    pub loss: f64,
    pub residuals: Vec<AnchorResidual>,
    pub all_within: bool,
    pub mechanism: InteriorMechanism,
    /// Winning restart; `None` when the starting parameters were kept.
    pub restart: Option<usize>,
    pub evaluations: usize,
    pub iterations: usize,
}

struct Problem<'a> {
    scenario: &'a Scenario,
    paths: Vec<&'static str>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    anchors: &'a [Anchor],
    integrator: IntegratorConfig,
}

impl Problem<'_> {
    fn values(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(u, (lo, hi))| lo + u.clamp(0.0, 1.0) * (hi - lo))
            .collect()
    }

    fn scenario_with(&self, values: &[f64]) -> Result<Scenario> {
        let mut s = self.scenario.clone();
        for (path, v) in self.paths.iter().zip(values) {
            s.params.set(path, *v)?;
        }
        Ok(s)
    }

    fn trajectory(&self, values: &[f64], cfg: &IntegratorConfig) -> Result<Trajectory> {
        let s = self.scenario_with(values)?;
        integrate(&s.model_params()?, &s.initial, cfg)
    }

    fn loss_of(&self, values: &[f64]) -> f64 {
        match self.trajectory(values, &self.integrator) {
            Ok(t) => weighted_loss(self.anchors, &t),
            Err(_) => f64::INFINITY,
        }
    }

    fn loss(&self, u: &[f64]) -> f64 {
        self.loss_of(&self.values(u))
    }
}

fn observe(t: &Trajectory, anchor: &Anchor) -> Option<f64> {
    t.at(anchor.t).map(|(x, y)| match anchor.observable {
        Observable::X => x,
        Observable::Y => y,
    })
}

fn weighted_loss(anchors: &[Anchor], t: &Trajectory) -> f64 {
    let mut total = 0.0;
    for a in anchors {
        match observe(t, a) {
            Some(v) => total += a.weight * (v - a.target).powi(2),
            None => return f64::INFINITY,
        }
    }
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

/// Residual of every anchor on `trajectory`.
pub fn residuals(anchors: &[Anchor], trajectory: &Trajectory) -> Result<Vec<AnchorResidual>> {
    anchors
        .iter()
        .map(|a| {
            let fitted = observe(trajectory, a).ok_or(Error::AnchorOutsideHorizon {
                t: a.t,
                horizon: trajectory.end_time().unwrap_or(0.0),
            })?;
            let residual = fitted - a.target;
            Ok(AnchorResidual {
                t: a.t,
                observable: a.observable,
                target: a.target,
                fitted,
                residual,
                tolerance: a.tolerance,
                within: residual.abs() <= a.tolerance,
            })
        })
        .collect()
}

pub fn interior_mechanism(p: &ModelParams) -> InteriorMechanism {
    if p.feedback && p.coupling_lambda * p.esdg.delta * p.consumer.info_total() != 0.0 {
        InteriorMechanism::Coupling
    } else if delta_manufacturer(p) == 0.0 {
        InteriorMechanism::KnifeEdge
    } else {
        InteriorMechanism::None
    }
}

fn latin_hypercube(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut points = vec![vec![0.0; n]; k];
    for d in 0..n {
        let mut strata: Vec<usize> = (0..k).collect();
        strata.shuffle(rng);
        for (point, s) in points.iter_mut().zip(strata) {
            point[d] = (s as f64 + rng.gen::<f64>()) / k as f64;
        }
    }
    points
}

struct Simplex {
    best: Vec<f64>,
    loss: f64,
    evaluations: usize,
    iterations: usize,
}

const SIMPLEX_STEP: f64 = 0.1;
const X_TOL: f64 = 1e-10;
const F_TOL: f64 = 1e-16;

fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], budget: usize) -> Simplex {
    let n = start.len();
    let project = |v: Vec<f64>| v.into_iter().map(|c| c.clamp(0.0, 1.0)).collect::<Vec<_>>();
    let evaluations = Cell::new(0usize);
    let eval = |v: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        f(v)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let s0 = project(start.to_vec());
    simplex.push((s0.clone(), eval(&s0)));
    for d in 0..n {
        let mut v = s0.clone();
        v[d] += if v[d] + SIMPLEX_STEP <= 1.0 { SIMPLEX_STEP } else { -SIMPLEX_STEP };
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    while evaluations.get() < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (lo, hi) = (simplex[0].1, simplex[n].1);
        let size = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if size < X_TOL || (lo.is_finite() && hi - lo <= F_TOL) {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> =
            (0..n).map(|d| simplex[..n].iter().map(|(v, _)| v[d]).sum::<f64>() / n as f64).collect();
        let toward = |t: f64| project(centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (w - c)).collect());

        let reflected = toward(-1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = toward(-2.0);
            let fe = eval(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let outside = fr < simplex[n].1;
            let contracted = toward(if outside { -0.5 } else { 0.5 });
            let fc = eval(&contracted);
            if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
                simplex[n] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let v: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                    let fv = eval(&v);
                    *vertex = (v, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (best, loss) = simplex.swap_remove(0);
    Simplex { best, loss, evaluations: evaluations.get(), iterations }
}

/// Fits `spec.free` so the scenario trajectory passes near the anchors.
///
/// The starting parameters are evaluated first and returned unchanged when
/// they already reproduce every anchor exactly. Otherwise each restart runs
/// Nelder–Mead from its own Latin-hypercube seed and the lowest loss wins,
/// ties going to the lower restart index. Residuals come from a fresh run
/// over the full configured horizon.
pub fn calibrate(spec: &CalibrationSpec, scenario: &Scenario) -> Result<CalibrationResult> {
    spec.validate()?;
    scenario.validate()?;
    let start = scenario.initial.t;
    let reach = start + scenario.integrator.horizon;
    if let Some(a) = spec.anchors.iter().find(|a| a.t < start || a.t > reach) {
        return Err(Error::AnchorOutsideHorizon { t: a.t, horizon: reach });
    }
    let latest = spec.anchors.iter().map(|a| a.t).fold(start, f64::max);
    let h = scenario.integrator.step_size;
    let steps = ((latest - start) / h).ceil().max(1.0);
    let problem = Problem {
        scenario,
        paths: spec.free.iter().map(|f| resolve_field(&f.parameter)).collect::<Result<_>>()?,
        lower: spec.free.iter().map(|f| f.lower).collect(),
        upper: spec.free.iter().map(|f| f.upper).collect(),
        anchors: &spec.anchors,
        integrator: IntegratorConfig { horizon: steps * h, ..scenario.integrator },
    };

    let initial: Vec<f64> = problem.paths.iter().map(|p| scenario.params.get(p)).collect::<Result<_>>()?;
    let in_bounds = initial.iter().zip(problem.lower.iter().zip(&problem.upper)).all(|(v, (lo, hi))| lo <= v && v <= hi);
    let initial_loss = if in_bounds { problem.loss_of(&initial) } else { f64::INFINITY };
    let mut evaluations = 1;
    let mut best: (Vec<f64>, f64, Option<usize>, usize) = (initial, initial_loss, None, 0);

    if initial_loss != 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let seeds = latin_hypercube(problem.paths.len(), spec.restarts, &mut rng);
        let runs: Vec<(usize, Simplex)> = seeds
            .par_iter()
            .enumerate()
            .map(|(i, u)| (i, nelder_mead(|v| problem.loss(v), u, spec.max_evaluations)))
            .collect();
        evaluations += runs.iter().map(|(_, s)| s.evaluations).sum::<usize>();
        if let Some((i, run)) = runs
            .into_iter()
            .filter(|(_, s)| s.loss.is_finite())
            .min_by(|a, b| a.1.loss.total_cmp(&b.1.loss).then(a.0.cmp(&b.0)))
        {
            if !(run.loss >= best.1) {
                best = (problem.values(&run.best), run.loss, Some(i), run.iterations);
            }
        }
    }
    if !best.1.is_finite() {
        return Err(Error::NoFiniteLoss);
    }

    let (values, loss, restart, iterations) = best;
    let fitted = problem.scenario_with(&values)?;
    let trajectory = integrate(&fitted.model_params()?, &fitted.initial, &fitted.integrator)?;
    let residuals = residuals(&spec.anchors, &trajectory)?;
    Ok(CalibrationResult {
        mechanism: interior_mechanism(&fitted.params),
        params: fitted.params,
        values: problem
            .paths
            .iter()
            .zip(&values)
            .map(|(p, v)| FittedValue { parameter: p.to_string(), value: *v })
            .collect(),
        loss,
        all_within: residuals.iter().all(|r| r.within),
        residuals,
        restart,
        evaluations,
        iterations,
    })
}
