//! Integrate the shipped scenario and print a coarse trajectory.

use nevgame::config::parse_config;
use nevgame::dynamics::integrate;

fn main() -> nevgame::Result<()> {
    let s = parse_config("paper2021")?.job.scenario().clone();
    let traj = integrate(&s.model_params()?, &s.initial, &s.integrator)?;
    for month in [0.0, 6.0, 12.0, 24.0, 36.0, 60.0, 120.0] {
        if let Some((x, y)) = traj.at(month) {
            println!("t = {month:>5}  x = {x:.4}  y = {y:.4}");
        }
    }
    println!("converged: {} at {:?}", traj.converged, traj.convergence_time);
    Ok(())
}
