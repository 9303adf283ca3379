//! TOML job files.
//!
//! ```toml
//! id = "example"
//! extends = "paper2021"        # optional: a built-in name or a path
//! feedback = true
//! coupling_lambda = -0.3
//!
//! [manufacturer]
//! R = 0.5                      # formula symbols or long names
//!
//! [consumer]
//! P1 = 290000
//! P2 = 150000
//!
//! [esdg]
//! sigma = 0.2                  # alias of delta
//!
//! [initial]
//! x = 0.135
//! y = 0.134
//!
//! [integrator]
//! step_size = 0.01
//!
//! [normalization]
//! pairwise = true
//!
//! [sweep]                      # or [calibration], never both
//! parameter = "esdg.delta"
//! values = [0.2, 0.4]
//! ```
//!
//! Keys in the extending file override the base; tables merge key by key,
//! arrays are replaced whole.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use toml::Table;

use crate::dynamics::IntegratorConfig;
use crate::error::{Error, Result};
use crate::normalize::{NormGroup, NormalizationSpec, Target};
use crate::params::{ConsumerParams, EsdgParams, ManufacturerParams, ModelParams, Scale};
use crate::scenarios::{CalibrationSpec, Scenario, SweepSpec};
use crate::state::GameState;

/// Configs shipped inside the binary, addressable by name.
pub const BUILTIN: &[(&str, &str)] = &[("paper2021", include_str!("../configs/paper2021.toml"))];

const MAX_EXTENDS_DEPTH: usize = 8;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialSection {
    x: Option<f64>,
    y: Option<f64>,
    #[serde(default)]
    t: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationSection {
    /// Start from the four NEV/TFV attribute pairs.
    #[serde(default)]
    pub pairwise: bool,
    #[serde(default)]
    pub target: Option<Target>,
    #[serde(default)]
    pub groups: Vec<NormGroup>,
}

impl NormalizationSection {
    pub fn resolve(&self) -> NormalizationSpec {
        let mut spec = if self.pairwise { NormalizationSpec::pairwise() } else { NormalizationSpec::default() };
        spec.groups.extend(self.groups.iter().cloned());
        if let Some(t) = self.target {
            spec.target = t;
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    parameter: String,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    extends: Option<String>,
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    scale: Scale,
    #[serde(default)]
    feedback: bool,
    #[serde(default, alias = "lambda")]
    coupling_lambda: f64,
    #[serde(default)]
    manufacturer: ManufacturerParams,
    #[serde(default)]
    consumer: ConsumerParams,
    #[serde(default)]
    esdg: EsdgParams,
    #[serde(default)]
    initial: InitialSection,
    #[serde(default)]
    integrator: IntegratorConfig,
    #[serde(default)]
    normalization: Option<NormalizationSection>,
    #[serde(default)]
    sweep: Option<SweepSection>,
    #[serde(default)]
    calibration: Option<CalibrationSpec>,
}

/// What one config file asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Scenario(Scenario),
    Sweep(SweepSpec),
    Calibration { spec: CalibrationSpec, scenario: Scenario },
}

impl Job {
    /// The scenario every job is built around.
    pub fn scenario(&self) -> &Scenario {
        match self {
            Job::Scenario(s) => s,
            Job::Sweep(s) => &s.base,
            Job::Calibration { scenario, .. } => scenario,
        }
    }
}

/// A parsed, merged and validated config.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub job: Job,
    /// Hex SHA-256 of the canonical JSON form of the resolved job.
    pub digest: String,
}

#[derive(Serialize)]
struct Canonical<'a> {
    scenario: &'a Scenario,
    sweep: Option<(&'a str, &'a [f64])>,
    calibration: Option<&'a CalibrationSpec>,
}

fn digest(job: &Job) -> Result<String> {
    let canonical = match job {
        Job::Scenario(s) => Canonical { scenario: s, sweep: None, calibration: None },
        Job::Sweep(s) => Canonical { scenario: &s.base, sweep: Some((&s.parameter, &s.values)), calibration: None },
        Job::Calibration { spec, scenario } => Canonical { scenario, sweep: None, calibration: Some(spec) },
    };
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(&canonical)?)))
}

fn config_error(text: &str, err: toml::de::Error) -> Error {
    let line = err.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
    Error::Config { line, message: err.message().to_string() }
}

/// Parses `text` once as a whole file so that syntax errors and unknown
/// keys carry line numbers, then returns it as a raw table for merging.
fn checked_table(text: &str) -> Result<Table> {
    toml::from_str::<ConfigFile>(text).map_err(|e| config_error(text, e))?;
    toml::from_str::<Table>(text).map_err(|e| config_error(text, e))
}

fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn builtin(name: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

fn load_table(text: &str, dir: Option<&Path>, depth: usize) -> Result<Table> {
    let mut table = checked_table(text)?;
    let Some(parent) = table.remove("extends") else { return Ok(table) };
    if depth >= MAX_EXTENDS_DEPTH {
        return Err(Error::Config { line: None, message: "`extends` chain too deep".into() });
    }
    let parent = parent
        .as_str()
        .ok_or_else(|| Error::Config { line: None, message: "`extends` must be a string".into() })?
        .to_string();
    let mut base = match builtin(&parent) {
        Some(t) => load_table(t, None, depth + 1)?,
        None => {
            let path = dir.map(|d| d.join(&parent)).unwrap_or_else(|| PathBuf::from(&parent));
            let text = std::fs::read_to_string(&path)?;
            load_table(&text, path.parent(), depth + 1).map_err(|e| in_file(e, &path))?
        }
    };
    base.remove("id");
    merge(&mut base, table);
    Ok(base)
}

fn in_file(err: Error, path: &Path) -> Error {
    match err {
        Error::Config { line, message } => Error::Config { line, message: format!("{}: {message}", path.display()) },
        other => other,
    }
}

fn resolve(file: ConfigFile, fallback_id: &str) -> Result<Job> {
    let missing = |k: &str| Error::Config { line: None, message: format!("missing `initial.{k}`") };
    let initial = GameState::new(
        file.initial.x.ok_or_else(|| missing("x"))?,
        file.initial.y.ok_or_else(|| missing("y"))?,
        file.initial.t,
    );
    let scenario = Scenario {
        id: file.id.unwrap_or_else(|| fallback_id.to_string()),
        params: ModelParams {
            scale: file.scale,
            feedback: file.feedback,
            coupling_lambda: file.coupling_lambda,
            manufacturer: file.manufacturer,
            consumer: file.consumer,
            esdg: file.esdg,
        },
        normalization: file.normalization.map(|n| n.resolve()),
        initial,
        integrator: file.integrator,
    };
    let job = match (file.sweep, file.calibration) {
        (Some(_), Some(_)) => {
            return Err(Error::Config { line: None, message: "a config holds either [sweep] or [calibration], not both".into() })
        }
        (Some(s), None) => {
            let spec = SweepSpec { base: scenario, parameter: s.parameter, values: s.values };
            spec.validate()?;
            Job::Sweep(spec)
        }
        (None, Some(spec)) => {
            spec.validate()?;
            scenario.validate()?;
            Job::Calibration { spec, scenario }
        }
        (None, None) => {
            scenario.validate()?;
            Job::Scenario(scenario)
        }
    };
    Ok(job)
}

/// Parses config text. `dir` anchors relative `extends` paths.
pub fn parse_str(text: &str, dir: Option<&Path>, fallback_id: &str) -> Result<Config> {
    let table = load_table(text, dir, 0)?;
    let file: ConfigFile = table.try_into().map_err(|e: toml::de::Error| Error::Config {
        line: None,
        message: e.message().to_string(),
    })?;
    let job = resolve(file, fallback_id)?;
    Ok(Config { digest: digest(&job)?, job })
}

/// Reads a config file, or a built-in config when `path` names one and no
/// such file exists.
pub fn parse_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let name = path.to_string_lossy();
    if !path.exists() {
        if let Some(text) = builtin(&name) {
            return parse_str(text, None, &name);
        }
    }
    let text = std::fs::read_to_string(path)?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
    parse_str(&text, path.parent(), &stem).map_err(|e| in_file(e, path))
}

#[derive(Serialize)]
struct InitialOut {
    x: f64,
    y: f64,
    t: f64,
}

#[derive(Serialize)]
struct ScenarioOut<'a> {
    id: &'a str,
    scale: Scale,
    feedback: bool,
    coupling_lambda: f64,
    manufacturer: &'a ManufacturerParams,
    consumer: &'a ConsumerParams,
    esdg: &'a EsdgParams,
    initial: InitialOut,
    integrator: &'a IntegratorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalization: Option<NormalizationSection>,
}

/// Scenario config that [`parse_str`] reads back to the same scenario.
pub fn scenario_to_toml(s: &Scenario) -> Result<String> {
    let out = ScenarioOut {
        id: &s.id,
        scale: s.params.scale,
        feedback: s.params.feedback,
        coupling_lambda: s.params.coupling_lambda,
        manufacturer: &s.params.manufacturer,
        consumer: &s.params.consumer,
        esdg: &s.params.esdg,
        initial: InitialOut { x: s.initial.x, y: s.initial.y, t: s.initial.t },
        integrator: &s.integrator,
        normalization: s.normalization.as_ref().map(|n| NormalizationSection {
            pairwise: false,
            target: Some(n.target),
            groups: n.groups.clone(),
        }),
    };
    toml::to_string(&out).map_err(|e| Error::Config { line: None, message: e.to_string() })
}
