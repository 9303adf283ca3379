//! Configured experiments: single runs, parameter sweeps, the raw versus
//! normalized comparison, calibration to observed adoption shares, and
//! forecasts from a calibrated scenario.

mod calibrate;
mod predict;

pub use calibrate::{
    calibrate, interior_mechanism, residuals, Anchor, AnchorResidual, CalibrationResult, CalibrationSpec, FittedValue,
    FreeParameter, InteriorMechanism, Observable,
};
pub use predict::{predict, Prediction, PredictionRow};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, rhs, IntegratorConfig};
use crate::error::{Error, Result};
use crate::normalize::{normalize_params, NormalizationSpec};
use crate::params::{resolve_field, validate, ModelParams};
use crate::stability::{classify, EquilibriumReport, Mode};
use crate::state::{GameState, Trajectory};

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub params: ModelParams,
    pub normalization: Option<NormalizationSpec>,
    pub initial: GameState,
    pub integrator: IntegratorConfig,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.id.trim().is_empty() {
            return Err(Error::Spec("scenario id must not be empty".into()));
        }
        if !self.initial.in_unit_square() {
            return Err(Error::Spec(format!(
                "initial state ({}, {}) outside the unit square",
                self.initial.x, self.initial.y
            )));
        }
        self.integrator.validate()?;
        self.model_params().map(|_| ())
    }

    /// Validated parameters after normalization, as fed to the dynamics.
    pub fn model_params(&self) -> Result<ModelParams> {
        let raw = validate(self.params)?;
        match &self.normalization {
            Some(spec) if !spec.is_empty() => validate(normalize_params(raw, spec)?.params),
            _ => Ok(raw),
        }
    }

    /// Copy with one raw parameter replaced.
    pub fn with_param(&self, field: &str, value: f64) -> Result<Scenario> {
        let mut s = self.clone();
        s.params.set(field, value)?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub trajectory: Trajectory,
    pub reports: Vec<EquilibriumReport>,
}

/// Normalizes, integrates, then enumerates and classifies equilibria
/// with the numeric Jacobian.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    s.validate()?;
    let params = s.model_params()?;
    let mut trajectory = integrate(&params, &s.initial, &s.integrator)?;
    trajectory.scenario_id = s.id.clone();
    let reports = classify(&params, Mode::Numeric)?;
    Ok(ScenarioOutcome { trajectory, reports })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: Scenario,
    pub parameter: String,
    pub values: Vec<f64>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        resolve_field(&self.parameter)?;
        if self.values.is_empty() {
            return Err(Error::Spec("sweep needs at least one value".into()));
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Spec(format!("sweep value {v} is not finite")));
        }
        self.base.validate()
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<ScenarioOutcome>,
}

impl SweepPoint {
    pub fn convergence_time(&self) -> Option<f64> {
        self.outcome.as_ref().ok().and_then(|o| o.trajectory.convergence_time)
    }

    pub fn endpoint(&self) -> Option<GameState> {
        self.outcome.as_ref().ok().and_then(|o| o.trajectory.last().copied())
    }
}

/// One scenario run per value, in ascending value order. A failing point
/// is reported in its slot and does not stop the others.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let path = resolve_field(&spec.parameter)?;
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    Ok(values
        .into_par_iter()
        .map(|value| {
            let outcome = spec.base.with_param(path, value).and_then(|mut s| {
                s.id = format!("{}[{}={}]", spec.base.id, path, value);
                run_scenario(&s)
            });
            SweepPoint { value, outcome }
        })
        .collect())
}

/// Per-run figures compared by [`compare_normalization`].
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub trajectory: Trajectory,
    /// Sign changes of dx/dt along the trajectory.
    pub oscillations: usize,
    pub endpoint: GameState,
    pub converged: bool,
    pub convergence_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationComparison {
    pub raw: RunSummary,
    pub normalized: RunSummary,
}

/// Sign changes of dx/dt; samples with |dx/dt| below `floor` carry no sign.
pub fn oscillation_count(params: &ModelParams, trajectory: &Trajectory, floor: f64) -> usize {
    let mut last_sign = 0.0;
    let mut changes = 0;
    for s in &trajectory.samples {
        let dx = rhs(params, s).0;
        if dx.abs() < floor {
            continue;
        }
        let sign = dx.signum();
        if last_sign != 0.0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    changes
}

fn summarize(s: &Scenario) -> Result<RunSummary> {
    let params = s.model_params()?;
    let outcome = run_scenario(s)?;
    let t = outcome.trajectory;
    let endpoint = *t.last().expect("at least one sample");
    Ok(RunSummary {
        oscillations: oscillation_count(&params, &t, s.integrator.convergence_epsilon),
        endpoint,
        converged: t.converged,
        convergence_time: t.convergence_time,
        trajectory: t,
    })
}

/// Runs `raw` once as given and once normalized with `spec`.
pub fn compare_normalization(raw: &Scenario, spec: &NormalizationSpec) -> Result<NormalizationComparison> {
    let plain = Scenario { id: format!("{}[raw]", raw.id), normalization: None, ..raw.clone() };
    let scaled = Scenario { id: format!("{}[normalized]", raw.id), normalization: Some(spec.clone()), ..raw.clone() };
    Ok(NormalizationComparison { raw: summarize(&plain)?, normalized: summarize(&scaled)? })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn logistic_scenario(dx: f64, dy: f64) -> Scenario {
        let mut p = ModelParams::default();
        p.manufacturer.nev_profit = dx.max(0.0);
        p.manufacturer.tfv_profit = (-dx).max(0.0);
        p.consumer.nev_price = dy.max(0.0);
        p.consumer.tfv_price = (-dy).max(0.0);
        Scenario {
            id: "logistic".into(),
            params: p,
            normalization: None,
            initial: GameState::new(0.3, 0.6, 0.0),
            integrator: IntegratorConfig { horizon: 80.0, ..Default::default() },
        }
    }

    #[test]
    fn run_reaches_predicted_corner() {
        for (dx, dy, corner) in [(1.0, 1.0, (1.0, 1.0)), (1.0, -1.0, (1.0, 0.0)), (-1.0, 1.0, (0.0, 1.0)), (-1.0, -1.0, (0.0, 0.0))] {
            let out = run_scenario(&logistic_scenario(dx, dy)).unwrap();
            let end = out.trajectory.last().unwrap();
            assert!((end.x - corner.0).abs() < 1e-6 && (end.y - corner.1).abs() < 1e-6);
            assert_eq!(out.trajectory.scenario_id, "logistic");
            assert_eq!(out.reports.len(), 4);
        }
    }

    #[test]
    fn knife_edge_stays_put() {
        let out = run_scenario(&logistic_scenario(0.0, 1.0)).unwrap();
        assert!(!out.trajectory.converged);
        assert!(out.trajectory.samples.iter().all(|s| s.x == 0.3));
    }

    #[test]
    fn deterministic() {
        let s = logistic_scenario(0.4, -0.7);
        assert_eq!(run_scenario(&s).unwrap(), run_scenario(&s).unwrap());
    }

    #[test]
    fn sweep_matches_standalone_runs() {
        let spec = SweepSpec { base: logistic_scenario(0.5, 0.5), parameter: "V1".into(), values: vec![2.0, 0.5, 1.0] };
        let points = sweep(&spec).unwrap();
        assert_eq!(points.iter().map(|p| p.value).collect::<Vec<_>>(), vec![0.5, 1.0, 2.0]);
        for p in &points {
            let mut alone = spec.base.with_param("V1", p.value).unwrap();
            alone.id = format!("logistic[manufacturer.nev_profit={}]", p.value);
            assert_eq!(p.outcome.as_ref().unwrap(), &run_scenario(&alone).unwrap());
        }
        // faster selection, no later convergence
        let times: Vec<_> = points.iter().map(|p| p.convergence_time().unwrap()).collect();
        assert!(times[0] > times[1] && times[1] >= times[2]);
    }

    #[test]
    fn failing_point_is_reported_in_slot() {
        let spec = SweepSpec { base: logistic_scenario(0.5, 0.5), parameter: "alpha".into(), values: vec![0.5, 3.0] };
        let points = sweep(&spec).unwrap();
        assert!(points[0].outcome.is_ok());
        assert!(matches!(points[1].outcome, Err(Error::Validation(_))));
        assert!(points[1].convergence_time().is_none());
    }

    #[test]
    fn sweep_rejects_unknown_parameter() {
        let spec = SweepSpec { base: logistic_scenario(0.5, 0.5), parameter: "zeta".into(), values: vec![1.0] };
        assert!(matches!(sweep(&spec), Err(Error::UnknownField(_))));
        let spec = SweepSpec { values: vec![], parameter: "alpha".into(), ..spec };
        assert!(sweep(&spec).is_err());
    }

    #[test]
    fn identity_normalization_changes_nothing() {
        let s = logistic_scenario(0.3, -0.2);
        let cmp = compare_normalization(&s, &NormalizationSpec::default()).unwrap();
        assert_eq!(cmp.raw.trajectory.samples, cmp.normalized.trajectory.samples);
        assert_eq!(cmp.raw.oscillations, 0);
    }
}
