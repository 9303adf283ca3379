//! Expectation supply-demand game: pair and group payoffs.

use nevgame::esdg::{group_payoff, pair_payoff, PopulationProfile, Strategy::*};
use nevgame::params::EsdgParams;

fn main() -> nevgame::Result<()> {
    let g = EsdgParams { base_payoff: 1.0, demand_payoff: 0.5, match_payoff: 0.4, delta: 0.3 };
    for (s, d) in [(C, C), (C, D), (D, C), (D, D)] {
        println!("{s:?} vs {d:?}: {:?}", pair_payoff(s, d, &g));
    }
    let profile = PopulationProfile::new(vec![C, C, D], vec![C, D])?;
    println!("3 suppliers x 2 consumers: {:?}", group_payoff(&profile, &g));
    Ok(())
}
