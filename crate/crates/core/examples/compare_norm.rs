//! Same scenario with raw and with normalized magnitudes.

use nevgame::config::parse_config;
use nevgame::scenarios::compare_normalization;

fn main() -> nevgame::Result<()> {
    let s = parse_config("paper2021")?.job.scenario().clone();
    let spec = s.normalization.clone().expect("shipped config normalizes");
    let cmp = compare_normalization(&s, &spec)?;
    for (name, r) in [("raw", &cmp.raw), ("normalized", &cmp.normalized)] {
        println!(
            "{name:<10} end ({:.4}, {:.4})  oscillations {}  clamped steps {}  converged at {:?}",
            r.endpoint.x, r.endpoint.y, r.oscillations, r.trajectory.clamped_steps, r.convergence_time
        );
    }
    Ok(())
}
