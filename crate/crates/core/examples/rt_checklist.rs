//! Weighted Rayleigh-Taylor checks past the turning time.

use turnwave::diagnostics::{weight_h, WeightParams};
use turnwave::scenario::{run_scenario, RtReportFile, ScenarioConfig, ScenarioKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for tau in [0.005, 0.05] {
        let p = WeightParams::new(100.0, tau)?;
        let at_pi = weight_h(std::f64::consts::PI, tau * tau, &p)?.value;
        println!("A = 100, tau = {tau}: h >= 0 everywhere: {}, h(pi, tau^2) = {at_pi:.3e}", p.h_nonnegative());
    }
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::RtVerify);
    cfg.output_dir = std::env::temp_dir().join("turnwave-rt");
    let out = run_scenario(&cfg)?;
    let rep: RtReportFile = serde_json::from_str(&std::fs::read_to_string(out.dir.join("rt_report.json"))?)?;
    println!("{:#?}", rep.sigma10_checklist);
    println!("{:#?}", rep.weighted_rt);
    Ok(())
}
