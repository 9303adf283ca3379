//! Min-Max scaling of the raw price, range, refuel and profit pairs.

use nevgame::normalize::{normalize_params, NormalizationSpec};
use nevgame::ModelParams;

fn main() -> nevgame::Result<()> {
    let mut raw = ModelParams::default();
    for (field, value) in [
        ("P1", 290000.0),
        ("P2", 150000.0),
        ("e1", 500.0),
        ("e2", 700.0),
        ("c1", 120.0),
        ("c2", 15.0),
        ("V1", 60.6),
        ("V2", 3882.0),
    ] {
        raw.set(field, value)?;
    }
    let out = normalize_params(raw, &NormalizationSpec::pairwise())?;
    for p in &out.provenance {
        println!("{:<28} {:>10} -> {:>3}  ({} in [{}, {}])", p.field, p.raw, out.params.get(&p.field)?, p.group, p.min, p.max);
    }
    Ok(())
}
