//! Full breakdown pipeline: real-space run to the turning time, then strip continuation
//! until the Rayleigh-Taylor sign changes.
//!
//! `cargo run --release --example muskat_breakdown [OUT_DIR]`

use turnwave::scenario::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> turnwave::Result<()> {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::MuskatBreakdown);
    cfg.output_dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("turnwave-breakdown"));
    let out = run_scenario(&cfg)?;
    for e in &out.events.events {
        println!("{:>14} t = {:.6}  {}", format!("{:?}", e.kind), e.t, e.payload);
    }
    println!("CK iterations: {}, strip arc-chord: {}", out.summary["ck_iterations"], out.summary["strip_arc_chord"]);
    println!("artifacts in {}", out.dir.display());
    Ok(())
}
