//! Equilibria and their stability, closed-form and numeric Jacobians.

use nevgame::config::parse_config;
use nevgame::stability::{classify, Mode};

fn main() -> nevgame::Result<()> {
    let p = parse_config("paper2021")?.job.scenario().model_params()?;
    for mode in [Mode::Paper, Mode::Numeric] {
        println!("{mode:?}");
        for r in classify(&p, mode)? {
            println!(
                "  ({:.4}, {:.4})  det {:+.4}  tr {:+.4}  {:?}",
                r.point.x, r.point.y, r.det, r.trace, r.classification
            );
        }
    }
    Ok(())
}
