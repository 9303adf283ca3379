//! Fit the free parameters to the adoption anchors.

use std::path::Path;

use nevgame::config::{parse_config, Job};
use nevgame::scenarios::calibrate;

fn main() -> nevgame::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/paper2021_calibration.toml");
    let Job::Calibration { spec, scenario } = parse_config(path)?.job else { unreachable!() };
    let fit = calibrate(&spec, &scenario)?;
    for v in &fit.values {
        println!("{:<24} {:.6}", v.parameter, v.value);
    }
    for r in &fit.residuals {
        println!("{:?}({}) {:.4} vs {:.4}  within: {}", r.observable, r.t, r.fitted, r.target, r.within);
    }
    println!("loss {:.3e}, mechanism {:?}, {} evaluations", fit.loss, fit.mechanism, fit.evaluations);
    Ok(())
}
