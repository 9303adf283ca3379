//! Two-population evolutionary game between vehicle manufacturers and
//! consumers choosing between new energy vehicles (NEVs) and traditional
//! fuel vehicles (TFVs).
//!
//! The crate covers the payoff model with and without consumer feedback,
//! Min-Max normalization of raw quantities, replicator dynamics with a
//! fixed-step RK4 integrator, Jacobian classification of equilibria, and
//! scenario runners for sweeps, calibration and forecasts. The `nevgame`
//! binary drives all of it from TOML configs.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod esdg;
pub mod io;
pub mod nev_model;
pub mod normalize;
pub mod params;
pub mod scenarios;
pub mod stability;
pub mod state;

pub use error::{Error, Result};
pub use params::ModelParams;
pub use state::{GameState, Trajectory};
