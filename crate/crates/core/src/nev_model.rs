//! Payoffs of the NEV adoption game and the payoff differences that drive
//! the replicator equations.
//!
//! Without feedback both differences are constants. With feedback the
//! consumer difference depends on the manufacturer share through the
//! expectation match term `(2x - 1)(epsilon - delta epsilon)(I1 + .. + I4)`
//! and on the consumer share through the decaying insurance `r (1 - y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::state::GameState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffQuad {
    /// Manufacturer producing NEVs.
    pub u1: f64,
    /// Manufacturer producing fuel vehicles.
    pub u2: f64,
    /// Consumer buying an NEV.
    pub u3: f64,
    /// Consumer buying a fuel vehicle.
    pub u4: f64,
}

fn nev_utility(p: &ModelParams, insurance: f64) -> f64 {
    let c = &p.consumer;
    c.nev_price + c.nev_range + c.nev_infrastructure - c.nev_refuel + insurance - c.purchase_tax
}

fn tfv_utility(p: &ModelParams) -> f64 {
    let c = &p.consumer;
    c.tfv_price + c.tfv_range + c.tfv_infrastructure - c.tfv_refuel - c.energy_price
}

fn consumer_difference(p: &ModelParams, insurance: f64) -> f64 {
    nev_utility(p, insurance) - tfv_utility(p)
}

pub fn payoffs_no_feedback(p: &ModelParams) -> PayoffQuad {
    let m = &p.manufacturer;
    let c = &p.consumer;
    let common = c.alpha * (c.commuting_need + c.environmental_need) + p.esdg.match_payoff * c.info_total();
    PayoffQuad {
        u1: m.points_bonus + m.nev_profit - m.rd_cost,
        u2: m.tfv_profit - m.fuel_penalty - m.pollution_penalty,
        u3: common + nev_utility(p, c.insurance),
        u4: common + tfv_utility(p),
    }
}

/// Manufacturer payoff difference `u1 - u2`. Positive makes `x = 1` attracting.
pub fn delta_manufacturer(p: &ModelParams) -> f64 {
    let m = &p.manufacturer;
    (m.points_bonus + m.nev_profit - m.rd_cost) - (m.tfv_profit - m.fuel_penalty - m.pollution_penalty)
}

/// Consumer payoff difference `u3 - u4`. Demand stimulus and information
/// terms are common to both choices and do not enter.
pub fn delta_consumer_no_feedback(p: &ModelParams) -> f64 {
    consumer_difference(p, p.consumer.insurance)
}

/// Insurance proceeds when a share `y` of consumers already drives NEVs.
pub fn battery_insurance(r: f64, y: f64) -> f64 {
    r * (1.0 - y)
}

/// `(epsilon - delta epsilon)(I1 + I2 + I3 + I4)`, the expectation payoff
/// retained after the mismatch discount.
pub fn retained_expectation(p: &ModelParams) -> f64 {
    (p.esdg.match_payoff - p.esdg.mismatch_discount()) * p.consumer.info_total()
}

pub fn delta_consumer_feedback(p: &ModelParams, state: &GameState) -> Result<f64> {
    if !p.feedback {
        return Err(Error::FeedbackDisabled);
    }
    let base = consumer_difference(p, battery_insurance(p.consumer.insurance, state.y));
    Ok(base + (2.0 * state.x - 1.0) * retained_expectation(p))
}

/// Manufacturer difference reduced by the reputation loss from
/// dissatisfied consumers, `lambda * delta * (1 - y) * sum(I)`.
pub fn delta_manufacturer_feedback(p: &ModelParams, state: &GameState) -> f64 {
    delta_manufacturer(p) - p.coupling_lambda * p.esdg.delta * (1.0 - state.y) * p.consumer.info_total()
}
