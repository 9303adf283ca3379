use serde::{Deserialize, Serialize};

use crate::dynamics::{integrate, long_run_limit, IntegratorConfig, LongRun};
use crate::error::{Error, Result};

use super::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub rows: Vec<PredictionRow>,
    pub long_run: LongRun,
}

/// Shares at each requested time, read off the trajectory by linear
/// interpolation, plus the long-run limit.
///
/// Times past the configured horizon extend the integration once, up to
/// `long_run_factor` times the horizon.
pub fn predict(fitted: &Scenario, horizons: &[f64]) -> Result<Prediction> {
    fitted.validate()?;
    let params = fitted.model_params()?;
    let cfg = fitted.integrator;
    let start = fitted.initial.t;
    if let Some(t) = horizons.iter().find(|t| !t.is_finite() || **t < start) {
        return Err(Error::Spec(format!("prediction time {t} precedes the initial state")));
    }
    let latest = horizons.iter().copied().fold(start, f64::max);
    let reach = start + cfg.horizon;
    let integrator = if latest > reach {
        let limit = start + cfg.horizon * cfg.long_run_factor;
        if latest > limit {
            return Err(Error::BeyondHorizon { t: latest, horizon: limit });
        }
        let steps = ((latest - start) / cfg.step_size).ceil();
        IntegratorConfig { horizon: steps * cfg.step_size, ..cfg }
    } else {
        cfg
    };
    let trajectory = integrate(&params, &fitted.initial, &integrator)?;
    let rows = horizons
        .iter()
        .map(|&t| {
            let (x, y) = trajectory
                .at(t)
                .ok_or(Error::BeyondHorizon { t, horizon: trajectory.end_time().unwrap_or(start) })?;
            Ok(PredictionRow { t, x, y })
        })
        .collect::<Result<Vec<_>>>()?;
    let long_run = long_run_limit(&params, &fitted.initial, &cfg)?;
    Ok(Prediction { rows, long_run })
}
