//! Expectation supply-demand game.
//!
//! Supply players earn `gamma + epsilon` against a demand player using the
//! same strategy and `gamma - delta * epsilon` otherwise. Demand players
//! always earn the constant `b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EsdgParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    /// Cooperation.
    C,
    /// Defection.
    D,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationProfile {
    supply: Vec<Strategy>,
    demand: Vec<Strategy>,
}

impl PopulationProfile {
    pub fn new(supply: Vec<Strategy>, demand: Vec<Strategy>) -> Result<Self> {
        if supply.is_empty() || demand.is_empty() {
            return Err(Error::Spec("both populations need at least one player".into()));
        }
        Ok(Self { supply, demand })
    }

    pub fn supply(&self) -> &[Strategy] {
        &self.supply
    }

    pub fn demand(&self) -> &[Strategy] {
        &self.demand
    }
}

/// Payoffs of one supply player `i` against one demand player `j`.
pub fn pair_payoff(supply: Strategy, demand: Strategy, esdg: &EsdgParams) -> (f64, f64) {
    let s = if supply == demand {
        esdg.base_payoff + esdg.match_payoff
    } else {
        esdg.base_payoff - esdg.mismatch_discount()
    };
    (s, esdg.demand_payoff)
}

/// Totals over every (supply, demand) pair, supply-major order.
pub fn group_payoff(profile: &PopulationProfile, esdg: &EsdgParams) -> (f64, f64) {
    profile
        .supply
        .iter()
        .flat_map(|&i| profile.demand.iter().map(move |&j| (i, j)))
        .map(|(i, j)| pair_payoff(i, j, esdg))
        .fold((0.0, 0.0), |(s, d), (ps, pd)| (s + ps, d + pd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Strategy::{C, D};

    fn esdg(delta: f64) -> EsdgParams {
        EsdgParams { base_payoff: 1.0, demand_payoff: 0.25, match_payoff: 0.5, delta }
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair_payoff(C, C, &esdg(0.2)), (1.5, 0.25));
        assert_eq!(pair_payoff(C, D, &esdg(0.0)), (1.0, 0.25));
        assert_eq!(pair_payoff(D, C, &esdg(0.2)), (0.9, 0.25));
        assert_eq!(pair_payoff(D, D, &esdg(0.2)), (1.5, 0.25));
    }

    #[test]
    fn group_examples() {
        let e = esdg(0.2);
        let single = PopulationProfile::new(vec![C], vec![C]).unwrap();
        assert_eq!(group_payoff(&single, &e), (1.5, 0.25));

        let two = PopulationProfile::new(vec![C, C], vec![C, D]).unwrap();
        let (s, d) = group_payoff(&two, &e);
        assert!((s - 4.8).abs() < 1e-12);
        assert_eq!(d, 1.0);

        let all = PopulationProfile::new(vec![D; 3], vec![D; 4]).unwrap();
        assert_eq!(group_payoff(&all, &e), (12.0 * 1.5, 12.0 * 0.25));
    }

    #[test]
    fn empty_population_rejected() {
        assert!(PopulationProfile::new(vec![], vec![C]).is_err());
        assert!(PopulationProfile::new(vec![C], vec![]).is_err());
    }

    #[test]
    fn one_more_match_adds_epsilon_plus_discount() {
        let e = esdg(0.3);
        let before = PopulationProfile::new(vec![C], vec![C, D]).unwrap();
        let after = PopulationProfile::new(vec![C], vec![C, C]).unwrap();
        let gain = group_payoff(&after, &e).0 - group_payoff(&before, &e).0;
        assert!((gain - (e.match_payoff + e.mismatch_discount())).abs() < 1e-12);
    }
}
