use serde::{Deserialize, Serialize};

/// Population shares at one instant.
///
/// `x` is the fraction of manufacturers producing NEVs, `y` the fraction of
/// consumers buying them, `t` the time in months.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameState {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub t: f64,
}

impl GameState {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn in_unit_square(&self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y) && self.t.is_finite()
    }
}

/// Time-ordered, uniformly spaced samples of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub scenario_id: String,
    pub step_size: f64,
    pub samples: Vec<GameState>,
    pub converged: bool,
    pub convergence_time: Option<f64>,
    /// Number of steps after which a share had to be clamped back into [0, 1].
    pub clamped_steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> Option<&GameState> {
        self.samples.last()
    }

    pub fn end_time(&self) -> Option<f64> {
        self.samples.last().map(|s| s.t)
    }

    /// Linear interpolation between the two samples bracketing `t`.
    /// `None` if `t` lies outside the sampled interval.
    pub fn at(&self, t: f64) -> Option<(f64, f64)> {
        let first = self.samples.first()?;
        let last = self.samples.last()?;
        if !(first.t..=last.t).contains(&t) {
            return None;
        }
        if self.samples.len() == 1 {
            return Some((first.x, first.y));
        }
        let pos = ((t - first.t) / self.step_size).floor();
        let i = (pos as usize).min(self.samples.len() - 2);
        let (a, b) = (&self.samples[i], &self.samples[i + 1]);
        let w = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
        Some((a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj() -> Trajectory {
        Trajectory {
            scenario_id: "t".into(),
            step_size: 0.5,
            samples: (0..5).map(|i| GameState::new(0.1 * i as f64, 0.2, 0.5 * i as f64)).collect(),
            converged: false,
            convergence_time: None,
            clamped_steps: 0,
        }
    }

    #[test]
    fn interpolates_between_samples() {
        let t = traj();
        let (x, y) = t.at(0.75).unwrap();
        assert!((x - 0.15).abs() < 1e-15);
        assert_eq!(y, 0.2);
        assert_eq!(t.at(0.0).unwrap().0, 0.0);
        assert!((t.at(2.0).unwrap().0 - 0.4).abs() < 1e-15);
        assert!(t.at(2.01).is_none());
        assert!(t.at(-0.1).is_none());
    }
}
