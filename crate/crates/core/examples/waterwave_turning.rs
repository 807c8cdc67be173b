//! Water waves from a graph to a vertical tangent.
//!
//! `cargo run --release --example waterwave_turning [OUT_DIR]`

use turnwave::scenario::{run_scenario, ScenarioConfig, ScenarioKind};

fn main() -> turnwave::Result<()> {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::WaterwaveTurning);
    cfg.output_dir = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("turnwave-ww"));
    let out = run_scenario(&cfg)?;
    let s = &out.summary;
    println!("certificate: {}", s["certificate"]);
    println!("datum round trip error: {}", s["roundtrip_error"]);
    println!("graph blow-up at t = {}, turning at t* = {}", s["graph_blowup_t"], s["t_star"]);
    println!("as_graph fails at t*: {}", s["as_graph_fails_at_turning"]);
    Ok(())
}
