//! Forecast shares at chosen months plus the long-run limit.

use nevgame::config::parse_config;
use nevgame::scenarios::predict;

fn main() -> nevgame::Result<()> {
    let s = parse_config("paper2021")?.job.scenario().clone();
    let p = predict(&s, &[12.0, 24.0, 36.0, 48.0])?;
    for r in &p.rows {
        println!("month {:>3}: x = {:.4}, y = {:.4}", r.t, r.x, r.y);
    }
    println!("long run: x = {:.4}, y = {:.4} (converged {})", p.long_run.x, p.long_run.y, p.long_run.converged);
    Ok(())
}
