//! Command-line front end. Every subcommand reads one config, writes its
//! outputs plus `manifest.json` into `--out`, and prints the written paths
//! on stdout. Diagnostics go to stderr.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 for failures while
//! running.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_config, scenario_to_toml, Config, Job};
use crate::error::{Error, Result};
use crate::io::{timestamp, trajectory_csv, to_json, RunManifest};
use crate::scenarios::{compare_normalization, predict, run_scenario, sweep, Scenario, SweepSpec};
use crate::scenarios::{calibrate, Observable, RunSummary};
use crate::stability::{classify, Mode};
use crate::state::GameState;

#[derive(Debug, Parser)]
#[command(name = "nevgame", version, about = "NEV adoption game: simulate, classify, sweep, calibrate, predict")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Config file, or the name of a built-in config such as `paper2021`.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the scenario and classify its equilibria.
    Simulate(Common),
    /// Classify the equilibria only.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "numeric")]
        mode: Mode,
    },
    /// Run the `[sweep]` of the config.
    Sweep(Common),
    /// Run the scenario with raw and with normalized values.
    CompareNorm(Common),
    /// Fit the `[calibration]` free parameters to its anchors.
    Calibrate(Common),
    /// Shares at given months plus the long-run limit.
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "12,24,36")]
        horizons: Vec<f64>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c) | Command::Sweep(c) | Command::CompareNorm(c) | Command::Calibrate(c) => c,
            Command::Classify { common, .. } | Command::Predict { common, .. } => common,
        }
    }
}

impl clap::ValueEnum for Mode {
    fn value_variants<'a>() -> &'a [Self] {
        &[Mode::Paper, Mode::Numeric]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(match self {
            Mode::Paper => "paper",
            Mode::Numeric => "numeric",
        }))
    }
}

/// Files produced by one command, written together at the end.
#[derive(Default)]
struct Outputs(Vec<(String, Vec<u8>)>);

impl Outputs {
    fn add(&mut self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.0.push((name.into(), bytes.into()));
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        self.add(name, to_json(value)?);
        Ok(())
    }

    fn csv(&mut self, name: impl Into<String>, samples: &[GameState]) -> Result<()> {
        self.add(name, trajectory_csv(samples)?);
        Ok(())
    }
}

#[derive(Serialize)]
struct SweepRow {
    value: f64,
    converged: bool,
    convergence_time: Option<f64>,
    endpoint: Option<GameState>,
    trajectory: Option<String>,
    error: Option<String>,
}

#[derive(Serialize)]
struct RunRow<'a> {
    oscillations: usize,
    endpoint: GameState,
    converged: bool,
    convergence_time: Option<f64>,
    clamped_steps: usize,
    trajectory: &'a str,
}

impl<'a> RunRow<'a> {
    fn new(r: &RunSummary, trajectory: &'a str) -> Self {
        Self {
            oscillations: r.oscillations,
            endpoint: r.endpoint,
            converged: r.converged,
            convergence_time: r.convergence_time,
            clamped_steps: r.trajectory.clamped_steps,
            trajectory,
        }
    }
}

fn need_scenario(cfg: &Config) -> &Scenario {
    cfg.job.scenario()
}

fn simulate(s: &Scenario, out: &mut Outputs) -> Result<()> {
    let outcome = run_scenario(s)?;
    out.csv("trajectory.csv", &outcome.trajectory.samples)?;
    out.json("report.json", &outcome.reports)
}

fn run_sweep(spec: &SweepSpec, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    for (i, point) in sweep(spec)?.into_iter().enumerate() {
        match &point.outcome {
            Ok(o) => {
                let name = format!("sweep_{i:03}.csv");
                out.csv(name.clone(), &o.trajectory.samples)?;
                rows.push(SweepRow {
                    value: point.value,
                    converged: o.trajectory.converged,
                    convergence_time: o.trajectory.convergence_time,
                    endpoint: o.trajectory.last().copied(),
                    trajectory: Some(name),
                    error: None,
                });
            }
            Err(e) => {
                eprintln!("warning: {} = {} failed: {e}", spec.parameter, point.value);
                rows.push(SweepRow {
                    value: point.value,
                    converged: false,
                    convergence_time: None,
                    endpoint: None,
                    trajectory: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }
    out.json("sweep.json", &rows)
}

fn execute(command: &Command, cfg: &Config, out: &mut Outputs) -> Result<()> {
    match command {
        Command::Simulate(_) => simulate(need_scenario(cfg), out),
        Command::Classify { mode, .. } => {
            let s = need_scenario(cfg);
            s.validate()?;
            out.json("report.json", &classify(&s.model_params()?, *mode)?)
        }
        Command::Sweep(_) => match &cfg.job {
            Job::Sweep(spec) => run_sweep(spec, out),
            _ => Err(Error::Spec("config has no [sweep] section".into())),
        },
        Command::CompareNorm(_) => {
            let s = need_scenario(cfg);
            let spec = s
                .normalization
                .clone()
                .filter(|n| !n.is_empty())
                .ok_or_else(|| Error::Spec("config has no [normalization] groups to compare against".into()))?;
            let cmp = compare_normalization(s, &spec)?;
            out.csv("raw.csv", &cmp.raw.trajectory.samples)?;
            out.csv("normalized.csv", &cmp.normalized.trajectory.samples)?;
            #[derive(Serialize)]
            struct Pair<'a> {
                raw: RunRow<'a>,
                normalized: RunRow<'a>,
            }
            out.json("compare.json", &Pair {
                raw: RunRow::new(&cmp.raw, "raw.csv"),
                normalized: RunRow::new(&cmp.normalized, "normalized.csv"),
            })
        }
        Command::Calibrate(_) => match &cfg.job {
            Job::Calibration { spec, scenario } => {
                let result = calibrate(spec, scenario)?;
                for r in &result.residuals {
                    eprintln!(
                        "{}({}) target {} fitted {:.6} residual {:+.6}{}",
                        match r.observable {
                            Observable::X => "x",
                            Observable::Y => "y",
                        },
                        r.t,
                        r.target,
                        r.fitted,
                        r.residual,
                        if r.within { "" } else { "  (outside tolerance)" }
                    );
                }
                let fitted = Scenario { params: result.params, ..scenario.clone() };
                let outcome = run_scenario(&fitted)?;
                out.json("calibration.json", &result)?;
                out.add("fitted.toml", scenario_to_toml(&fitted)?);
                out.csv("trajectory.csv", &outcome.trajectory.samples)
            }
            _ => Err(Error::Spec("config has no [calibration] section".into())),
        },
        Command::Predict { horizons, .. } => {
            let p = predict(need_scenario(cfg), horizons)?;
            let rows: Vec<GameState> = p.rows.iter().map(|r| GameState::new(r.x, r.y, r.t)).collect();
            out.csv("prediction.csv", &rows)?;
            out.json("prediction.json", &p)
        }
    }
}

fn write_all(dir: &Path, outputs: Outputs) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, bytes) in outputs.0 {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Runs one parsed command and returns the paths written, manifest last.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let started = SystemTime::now();
    let common = cli.command.common();
    let cfg = parse_config(&common.config)?;
    let mut outputs = Outputs::default();
    execute(&cli.command, &cfg, &mut outputs)?;
    let mut paths = write_all(&common.out, outputs)?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: cfg.digest.clone(),
        started: timestamp(started),
        finished: timestamp(SystemTime::now()),
        outputs: paths.clone(),
    };
    let manifest_path = common.out.join("manifest.json");
    fs::write(&manifest_path, to_json(&manifest)?)?;
    paths.push(manifest_path);
    Ok(paths)
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_validation() {
        1
    } else {
        2
    }
}

/// Parses `args`, runs, reports and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = if std::env::var_os("NO_COLOR").is_some() { clap::ColorChoice::Never } else { clap::ColorChoice::Auto };
    let cli = match <Cli as clap::CommandFactory>::command().color(color).try_get_matches_from(args) {
        Ok(m) => match <Cli as clap::FromArgMatches>::from_arg_matches(&m) {
            Ok(cli) => cli,
            Err(e) => {
                eprintln!("{e}");
                return 1;
            }
        },
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["nevgame", "predict", "--config", "c.toml", "--out", "o", "--horizons", "6,12"]).unwrap();
        match cli.command {
            Command::Predict { horizons, .. } => assert_eq!(horizons, vec![6.0, 12.0]),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from(["nevgame", "classify", "--config", "c", "--out", "o", "--mode", "paper"]).unwrap();
        assert!(matches!(cli.command, Command::Classify { mode: Mode::Paper, .. }));
        let cli = Cli::try_parse_from(["nevgame", "compare-norm", "--config", "c", "--out", "o"]).unwrap();
        assert!(matches!(cli.command, Command::CompareNorm(_)));
        let cli = Cli::try_parse_from(["nevgame", "predict", "--config", "c", "--out", "o"]).unwrap();
        assert!(matches!(cli.command, Command::Predict { ref horizons, .. } if horizons == &[12.0, 24.0, 36.0]));
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["nevgame", "simulate"]), 1);
        assert_eq!(main_with_args(["nevgame", "classify", "--config", "c", "--out", "o", "--mode", "exact"]), 1);
    }
}
