//! Min-Max rescaling of heterogeneous raw quantities.
//!
//! Values are rescaled per group: every member of a group shares the
//! group's minimum and maximum, so NEV/TFV attribute pairs end up on a
//! common scale. Values outside a group's (min, max) map affinely outside
//! the target interval; nothing is clamped.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{resolve_field, ModelParams, Scale};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// [0, 1]
    Unit,
    /// [-1, 1]
    #[default]
    Signed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormGroup {
    pub name: String,
    pub fields: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationSpec {
    #[serde(default)]
    pub target: Target,
    #[serde(default)]
    pub groups: Vec<NormGroup>,
}

impl NormalizationSpec {
    /// Each NEV/TFV attribute pair forms its own group: prices, ranges,
    /// energy-supplement efficiencies and profits.
    pub fn pairwise() -> Self {
        let group = |name: &str, a: &str, b: &str| NormGroup {
            name: name.to_string(),
            fields: vec![a.to_string(), b.to_string()],
            min: None,
            max: None,
        };
        Self {
            target: Target::Signed,
            groups: vec![
                group("price", "P1", "P2"),
                group("range", "e1", "e2"),
                group("refuel", "c1", "c2"),
                group("profit", "V1", "V2"),
            ],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

/// Where a normalized field came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProvenance {
    pub field: String,
    pub group: String,
    pub raw: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub params: ModelParams,
    pub provenance: Vec<FieldProvenance>,
}

fn check_range(value: f64, min: f64, max: f64) -> Result<()> {
    if !(value.is_finite() && min.is_finite() && max.is_finite()) {
        return Err(Error::NonFinite(format!("value {value}, range ({min}, {max})")));
    }
    if min >= max {
        return Err(Error::DegenerateRange { group: String::new(), min, max });
    }
    Ok(())
}

/// `(value - min) / (max - min)`.
pub fn normalize_unit(value: f64, min: f64, max: f64) -> Result<f64> {
    check_range(value, min, max)?;
    Ok((value - min) / (max - min))
}

/// `2 (value - min) / (max - min) - 1`.
pub fn normalize_signed(value: f64, min: f64, max: f64) -> Result<f64> {
    Ok(2.0 * normalize_unit(value, min, max)? - 1.0)
}

/// Rescales every grouped field; fields in no group pass through.
pub fn normalize_params(raw: ModelParams, spec: &NormalizationSpec) -> Result<Normalized> {
    if spec.is_empty() {
        return Ok(Normalized { params: raw, provenance: Vec::new() });
    }
    if raw.scale == Scale::Normalized {
        return Err(Error::Spec("parameters are already normalized".into()));
    }

    let mut seen = BTreeSet::new();
    let mut out = raw;
    out.scale = Scale::Normalized;
    let mut provenance = Vec::new();

    for group in &spec.groups {
        let paths = group
            .fields
            .iter()
            .map(|f| resolve_field(f))
            .collect::<Result<Vec<_>>>()?;
        for p in &paths {
            if !seen.insert(*p) {
                return Err(Error::DuplicateField(p.to_string()));
            }
        }
        let values = paths.iter().map(|p| raw.get(p)).collect::<Result<Vec<_>>>()?;
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("group `{}` contains {bad}", group.name)));
        }
        let (min, max) = match (group.min, group.max) {
            (Some(lo), Some(hi)) => (lo, hi),
            (None, None) => values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v))),
            _ => {
                return Err(Error::Spec(format!(
                    "group `{}` must give both min and max or neither",
                    group.name
                )))
            }
        };
        if !(min < max) {
            return Err(Error::DegenerateRange { group: group.name.clone(), min, max });
        }
        for (path, value) in paths.iter().zip(values) {
            let scaled = match spec.target {
                Target::Unit => normalize_unit(value, min, max)?,
                Target::Signed => normalize_signed(value, min, max)?,
            };
            out.set(path, scaled)?;
            provenance.push(FieldProvenance {
                field: path.to_string(),
                group: group.name.clone(),
                raw: value,
                min,
                max,
            });
        }
    }
    Ok(Normalized { params: out, provenance })
}
