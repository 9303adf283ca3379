//! Convergence time as the feedback factor varies.

use std::path::Path;

use nevgame::config::{parse_config, Job};
use nevgame::scenarios::sweep;

fn main() -> nevgame::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/sweep_delta.toml");
    let Job::Sweep(spec) = parse_config(path)?.job else { unreachable!() };
    for point in sweep(&spec)? {
        let end = point.endpoint();
        println!(
            "{} = {:<4} converged at {:>7.2}  end ({:.4}, {:.4})",
            spec.parameter,
            point.value,
            point.convergence_time().unwrap_or(f64::NAN),
            end.map_or(f64::NAN, |e| e.x),
            end.map_or(f64::NAN, |e| e.y)
        );
    }
    Ok(())
}
