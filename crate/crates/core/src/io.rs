//! Output files: trajectory CSV, JSON reports and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::stability::EquilibriumReport;
use crate::state::{GameState, Trajectory};

/// `t,x,y` rows, one per sample. Floats use the shortest decimal that
/// parses back to the same value.
pub fn trajectory_csv(samples: &[GameState]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "x", "y"])?;
    for s in samples {
        w.write_record([s.t.to_string(), s.x.to_string(), s.y.to_string()])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

pub fn emit_trajectory(trajectory: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, trajectory_csv(&trajectory.samples)?)?;
    Ok(())
}

pub fn read_trajectory(path: impl AsRef<Path>) -> Result<Vec<GameState>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<Vec<GameState>, _>>()?)
}

/// Pretty JSON with the struct field order; an empty list is `[]`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

pub fn emit_report(reports: &[EquilibriumReport], path: impl AsRef<Path>) -> Result<()> {
    write_json(reports, path)
}

pub fn read_report(path: impl AsRef<Path>) -> Result<Vec<EquilibriumReport>> {
    read_json(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_digest: String,
    /// RFC 3339, UTC.
    pub started: String,
    pub finished: String,
    pub outputs: Vec<PathBuf>,
}

pub fn timestamp(t: SystemTime) -> String {
    humantime::format_rfc3339_millis(t).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{Classification, Complex, Mode, Point};
    use proptest::prelude::*;

    #[test]
    fn one_sample_body() {
        let bytes = trajectory_csv(&[GameState::new(0.135, 0.134, 0.0)]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "t,x,y\n0,0.135,0.134\n");
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(trajectory_csv(&[]).unwrap(), b"t,x,y\n");
    }

    #[test]
    fn empty_report_list() {
        assert_eq!(to_json::<[EquilibriumReport]>(&[]).unwrap(), "[]");
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let reports = vec![EquilibriumReport {
            point: Point { x: 1.0, y: 0.0 },
            jacobian: [[-0.1, 0.0], [1e-17, 2.5]],
            det: -0.25,
            trace: 2.4,
            eigenvalues: [Complex { re: 2.5, im: 0.0 }, Complex { re: -0.1, im: 0.0 }],
            classification: Classification::Saddle,
            mode: Mode::Numeric,
            in_domain: true,
        }];
        emit_report(&reports, &path).unwrap();
        assert_eq!(read_report(&path).unwrap(), reports);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.find("\"point\"").unwrap() < text.find("\"classification\"").unwrap());
        assert!(text.contains("\"saddle\""));
    }

    proptest! {
        #[test]
        fn csv_round_trip(rows in prop::collection::vec((0.0..1e4f64, 0.0..=1.0f64, 0.0..=1.0f64), 0..40)) {
            let samples: Vec<GameState> = rows.iter().map(|&(t, x, y)| GameState::new(x, y, t)).collect();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.csv");
            fs::write(&path, trajectory_csv(&samples).unwrap()).unwrap();
            prop_assert_eq!(read_trajectory(&path).unwrap(), samples);
        }
    }

    #[test]
    fn tiny_values_round_trip() {
        let samples = vec![GameState::new(1e-300, 5e-324, 0.1 + 0.2)];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        fs::write(&path, trajectory_csv(&samples).unwrap()).unwrap();
        assert_eq!(read_trajectory(&path).unwrap(), samples);
    }
}
