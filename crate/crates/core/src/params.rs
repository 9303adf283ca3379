//! Model parameters for the manufacturer/consumer game.
//!
//! Every payoff symbol has a named field. Fields are addressed by a
//! canonical dotted path (`consumer.nev_price`) or by the short symbol
//! used in the payoff formulas (`P1`); see [`FIELDS`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Whether payoff inputs are in their original units or already rescaled.
///
/// Raw values must be non-negative. Normalized values may be negative
/// (a signed Min-Max map sends the group minimum to -1).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Raw,
    Normalized,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManufacturerParams {
    /// NEV points bonus under the dual-credit policy (R).
    #[serde(alias = "R")]
    pub points_bonus: f64,
    /// Profit from NEVs (V1).
    #[serde(alias = "V1")]
    pub nev_profit: f64,
    /// Profit from fuel vehicles (V2).
    #[serde(alias = "V2")]
    pub tfv_profit: f64,
    /// NEV research and development cost (C).
    #[serde(alias = "C")]
    pub rd_cost: f64,
    /// Average fuel-consumption points penalty (f1).
    #[serde(alias = "f1")]
    pub fuel_penalty: f64,
    /// Pollution penalty (f2).
    #[serde(alias = "f2")]
    pub pollution_penalty: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConsumerParams {
    #[serde(alias = "T")]
    pub commuting_need: f64,
    #[serde(alias = "E")]
    pub environmental_need: f64,
    /// External stimulus to demand (promotion, advertising), in [0, 1].
    pub alpha: f64,
    /// Information from brick-and-mortar stores (I1).
    #[serde(alias = "I1")]
    pub info_store: f64,
    /// Information from the Internet (I2).
    #[serde(alias = "I2")]
    pub info_internet: f64,
    /// Information from personal contacts (I3).
    #[serde(alias = "I3")]
    pub info_contacts: f64,
    /// Information released by the media (I4).
    #[serde(alias = "I4")]
    pub info_media: f64,
    #[serde(alias = "P1")]
    pub nev_price: f64,
    #[serde(alias = "P2")]
    pub tfv_price: f64,
    #[serde(alias = "A")]
    pub purchase_tax: f64,
    /// Energy price for fuel vehicles (p).
    #[serde(alias = "p")]
    pub energy_price: f64,
    /// Battery payout and replacement insurance proceeds (r).
    #[serde(alias = "r")]
    pub insurance: f64,
    #[serde(alias = "e1")]
    pub nev_range: f64,
    #[serde(alias = "e2")]
    pub tfv_range: f64,
    #[serde(alias = "n1")]
    pub nev_infrastructure: f64,
    #[serde(alias = "n2")]
    pub tfv_infrastructure: f64,
    /// Energy supplement efficiency (c1).
    #[serde(alias = "c1")]
    pub nev_refuel: f64,
    #[serde(alias = "c2")]
    pub tfv_refuel: f64,
}

impl ConsumerParams {
    /// I1 + I2 + I3 + I4.
    pub fn info_total(&self) -> f64 {
        self.info_store + self.info_internet + self.info_contacts + self.info_media
    }
}

/// Parameters of the expectation supply-demand game.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsdgParams {
    /// Basic payoff of a supply player.
    #[serde(alias = "gamma")]
    pub base_payoff: f64,
    /// Constant payoff of a demand player.
    #[serde(alias = "b")]
    pub demand_payoff: f64,
    /// Expected matching payoff.
    #[serde(alias = "epsilon")]
    pub match_payoff: f64,
    /// Mismatch discount factor, also the post-purchase feedback factor.
    #[serde(alias = "sigma")]
    pub delta: f64,
}

impl EsdgParams {
    /// Expected mismatch discount `delta * epsilon`.
    pub fn mismatch_discount(&self) -> f64 {
        self.delta * self.match_payoff
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub scale: Scale,
    pub feedback: bool,
    /// Reputation coupling of the manufacturer payoff to the share of
    /// dissatisfied consumers. Zero gives the uncoupled manufacturer dynamic.
    pub coupling_lambda: f64,
    pub manufacturer: ManufacturerParams,
    pub consumer: ConsumerParams,
    pub esdg: EsdgParams,
}

/// Canonical path and formula symbol for every numeric parameter.
pub const FIELDS: &[(&str, &str)] = &[
    ("manufacturer.points_bonus", "R"),
    ("manufacturer.nev_profit", "V1"),
    ("manufacturer.tfv_profit", "V2"),
    ("manufacturer.rd_cost", "C"),
    ("manufacturer.fuel_penalty", "f1"),
    ("manufacturer.pollution_penalty", "f2"),
    ("consumer.commuting_need", "T"),
    ("consumer.environmental_need", "E"),
    ("consumer.alpha", "alpha"),
    ("consumer.info_store", "I1"),
    ("consumer.info_internet", "I2"),
    ("consumer.info_contacts", "I3"),
    ("consumer.info_media", "I4"),
    ("consumer.nev_price", "P1"),
    ("consumer.tfv_price", "P2"),
    ("consumer.purchase_tax", "A"),
    ("consumer.energy_price", "p"),
    ("consumer.insurance", "r"),
    ("consumer.nev_range", "e1"),
    ("consumer.tfv_range", "e2"),
    ("consumer.nev_infrastructure", "n1"),
    ("consumer.tfv_infrastructure", "n2"),
    ("consumer.nev_refuel", "c1"),
    ("consumer.tfv_refuel", "c2"),
    ("esdg.base_payoff", "gamma"),
    ("esdg.demand_payoff", "b"),
    ("esdg.match_payoff", "epsilon"),
    ("esdg.delta", "delta"),
    ("coupling_lambda", "lambda"),
];

/// Resolves a canonical path, a formula symbol, or a `section.symbol`
/// form (`esdg.sigma`, `consumer.P1`) to the canonical path.
pub fn resolve_field(name: &str) -> Result<&'static str> {
    fn symbol(s: &str) -> &str {
        match s {
            "sigma" => "delta",
            "alpha1" => "alpha",
            other => other,
        }
    }
    let name = name.trim();
    let found = match name.split_once('.') {
        Some((section, rest)) => FIELDS.iter().find(|(path, sym)| {
            *path == name || (path.strip_prefix(section).is_some_and(|t| t.starts_with('.')) && *sym == symbol(rest))
        }),
        None => FIELDS.iter().find(|(path, sym)| *path == name || *sym == symbol(name)),
    };
    found.map(|(path, _)| *path).ok_or_else(|| Error::UnknownField(name.to_string()))
}

macro_rules! slot {
    ($p:expr, $path:expr) => {
        match $path {
            "manufacturer.points_bonus" => &mut $p.manufacturer.points_bonus,
            "manufacturer.nev_profit" => &mut $p.manufacturer.nev_profit,
            "manufacturer.tfv_profit" => &mut $p.manufacturer.tfv_profit,
            "manufacturer.rd_cost" => &mut $p.manufacturer.rd_cost,
            "manufacturer.fuel_penalty" => &mut $p.manufacturer.fuel_penalty,
            "manufacturer.pollution_penalty" => &mut $p.manufacturer.pollution_penalty,
            "consumer.commuting_need" => &mut $p.consumer.commuting_need,
            "consumer.environmental_need" => &mut $p.consumer.environmental_need,
            "consumer.alpha" => &mut $p.consumer.alpha,
            "consumer.info_store" => &mut $p.consumer.info_store,
            "consumer.info_internet" => &mut $p.consumer.info_internet,
            "consumer.info_contacts" => &mut $p.consumer.info_contacts,
            "consumer.info_media" => &mut $p.consumer.info_media,
            "consumer.nev_price" => &mut $p.consumer.nev_price,
            "consumer.tfv_price" => &mut $p.consumer.tfv_price,
            "consumer.purchase_tax" => &mut $p.consumer.purchase_tax,
            "consumer.energy_price" => &mut $p.consumer.energy_price,
            "consumer.insurance" => &mut $p.consumer.insurance,
            "consumer.nev_range" => &mut $p.consumer.nev_range,
            "consumer.tfv_range" => &mut $p.consumer.tfv_range,
            "consumer.nev_infrastructure" => &mut $p.consumer.nev_infrastructure,
            "consumer.tfv_infrastructure" => &mut $p.consumer.tfv_infrastructure,
            "consumer.nev_refuel" => &mut $p.consumer.nev_refuel,
            "consumer.tfv_refuel" => &mut $p.consumer.tfv_refuel,
            "esdg.base_payoff" => &mut $p.esdg.base_payoff,
            "esdg.demand_payoff" => &mut $p.esdg.demand_payoff,
            "esdg.match_payoff" => &mut $p.esdg.match_payoff,
            "esdg.delta" => &mut $p.esdg.delta,
            "coupling_lambda" => &mut $p.coupling_lambda,
            _ => unreachable!("unregistered field path {}", $path),
        }
    };
}

impl ModelParams {
    pub fn get(&self, field: &str) -> Result<f64> {
        let path = resolve_field(field)?;
        let mut copy = *self;
        Ok(*slot!(copy, path))
    }

    pub fn set(&mut self, field: &str, value: f64) -> Result<()> {
        let path = resolve_field(field)?;
        *slot!(self, path) = value;
        Ok(())
    }

    /// Copy with one field replaced.
    pub fn with(mut self, field: &str, value: f64) -> Result<Self> {
        self.set(field, value)?;
        Ok(self)
    }

    /// Returns the params unchanged if every range constraint holds,
    /// otherwise all violations at once.
    pub fn validate(self) -> Result<Self> {
        validate(self)
    }
}

const NON_NEGATIVE: &str = "[0, inf)";

/// Checks every parameter range.
///
/// All values must be finite. `alpha` lies in [0, 1], `delta` in [0, 1),
/// `epsilon` is non-negative. At [`Scale::Raw`] every manufacturer and
/// consumer quantity must also be non-negative.
pub fn validate(params: ModelParams) -> Result<ModelParams> {
    let mut violations = Vec::new();
    for (path, _) in FIELDS {
        let v = params.get(path).expect("registered field");
        if !v.is_finite() {
            violations.push(Violation { field: path.to_string(), value: v, allowed: "finite" });
            continue;
        }
        let allowed = match *path {
            "consumer.alpha" if !(0.0..=1.0).contains(&v) => Some("[0, 1]"),
            "esdg.delta" if !(0.0..1.0).contains(&v) => Some("[0, 1)"),
            "esdg.match_payoff" if v < 0.0 => Some(NON_NEGATIVE),
            "consumer.alpha" | "esdg.delta" | "esdg.match_payoff" => None,
            p if params.scale == Scale::Raw
                && (p.starts_with("manufacturer.") || p.starts_with("consumer."))
                && v < 0.0 =>
            {
                Some(NON_NEGATIVE)
            }
            _ => None,
        };
        if let Some(allowed) = allowed {
            violations.push(Violation { field: path.to_string(), value: v, allowed });
        }
    }
    if violations.is_empty() {
        Ok(params)
    } else {
        Err(Error::Validation(violations))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn in_range() -> ModelParams {
        let mut p = ModelParams::default();
        p.consumer.alpha = 0.5;
        p.esdg.delta = 0.2;
        p.esdg.match_payoff = 1.0;
        p
    }

    fn violated_fields(err: Error) -> Vec<String> {
        match err {
            Error::Validation(v) => v.into_iter().map(|v| v.field).collect(),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn accepts_in_range() {
        let p = in_range();
        assert_eq!(validate(p).unwrap(), p);
    }

    #[test]
    fn alpha_above_one_is_rejected() {
        let mut p = in_range();
        p.consumer.alpha = 1.2;
        let err = validate(p).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("consumer.alpha") && msg.contains("[0, 1]"), "{msg}");
    }

    #[test]
    fn delta_of_one_is_rejected() {
        let mut p = in_range();
        p.esdg.delta = 1.0;
        let err = validate(p).unwrap_err();
        assert!(err.to_string().contains("[0, 1)"));
        assert_eq!(violated_fields(err), vec!["esdg.delta"]);
    }

    #[test]
    fn reports_every_violation() {
        let mut p = in_range();
        p.consumer.alpha = -0.1;
        p.manufacturer.rd_cost = -3.0;
        p.consumer.nev_price = f64::NAN;
        let fields = violated_fields(validate(p).unwrap_err());
        assert_eq!(fields, vec!["manufacturer.rd_cost", "consumer.alpha", "consumer.nev_price"]);
    }

    #[test]
    fn normalized_scale_allows_negative_values() {
        let mut p = in_range();
        p.scale = Scale::Normalized;
        p.consumer.tfv_price = -1.0;
        assert!(validate(p).is_ok());
        p.scale = Scale::Raw;
        assert!(validate(p).is_err());
    }

    #[test]
    fn validate_is_idempotent() {
        let p = in_range();
        assert_eq!(validate(validate(p).unwrap()).unwrap(), validate(p).unwrap());
    }

    #[test]
    fn field_names_resolve() {
        assert_eq!(resolve_field("P1").unwrap(), "consumer.nev_price");
        assert_eq!(resolve_field("p").unwrap(), "consumer.energy_price");
        assert_eq!(resolve_field("R").unwrap(), "manufacturer.points_bonus");
        assert_eq!(resolve_field("r").unwrap(), "consumer.insurance");
        assert_eq!(resolve_field("sigma").unwrap(), "esdg.delta");
        assert_eq!(resolve_field("esdg.sigma").unwrap(), "esdg.delta");
        assert_eq!(resolve_field("consumer.P1").unwrap(), "consumer.nev_price");
        assert!(resolve_field("manufacturer.P1").is_err());
        assert!(resolve_field("nonsense").is_err());
    }

    #[test]
    fn get_and_set_round_trip_every_field() {
        let mut p = ModelParams::default();
        for (i, (path, sym)) in FIELDS.iter().enumerate() {
            p.set(path, i as f64 + 0.5).unwrap();
            assert_eq!(p.get(sym).unwrap(), i as f64 + 0.5);
        }
    }
}
