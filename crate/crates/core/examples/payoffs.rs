//! Payoff matrix entries and strategy advantages, with and without feedback.

use nevgame::config::parse_config;
use nevgame::nev_model::{delta_consumer_feedback, delta_consumer_no_feedback, delta_manufacturer, payoffs_no_feedback};
use nevgame::GameState;

fn main() -> nevgame::Result<()> {
    let scenario = parse_config("paper2021")?.job.scenario().clone();
    let p = scenario.model_params()?;
    println!("{:#?}", payoffs_no_feedback(&p));
    println!("manufacturer advantage {:.6}", delta_manufacturer(&p));
    println!("consumer advantage (no feedback) {:.6}", delta_consumer_no_feedback(&p));
    for (x, y) in [(0.1, 0.1), (0.5, 0.5), (0.9, 0.9)] {
        let d = delta_consumer_feedback(&p, &GameState::new(x, y, 0.0))?;
        println!("consumer advantage with feedback at ({x}, {y}): {d:.6}");
    }
    Ok(())
}
