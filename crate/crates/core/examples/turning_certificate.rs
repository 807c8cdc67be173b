//! Build the open turning candidate, certify it, and compare the two dv1 formulas.

use turnwave::initial_data::{certify_open, dv1_at_zero_full, dv1_at_zero_reduced, turning_candidate_open, TurningParams};
use turnwave::Grid;

fn main() -> turnwave::Result<()> {
    let params = TurningParams::default();
    for n in [256, 512, 1024] {
        let c = turning_candidate_open(&params, Grid::open(n, 40.0, 5.0)?)?;
        let (r, f) = (dv1_at_zero_reduced(&c)?, dv1_at_zero_full(&c)?);
        println!("N = {n}: reduced {r:.10}, full {f:.10}, rel diff {:.2e}", ((r - f) / r).abs());
    }
    let c = turning_candidate_open(&params, Grid::open(512, 40.0, 5.0)?)?;
    let cert = certify_open(&c)?;
    println!("{cert:#?}");
    // a flat profile does not bend back
    let weak = turning_candidate_open(&TurningParams { b: 1.0, ..params }, Grid::open(512, 40.0, 5.0)?)?;
    println!("b = 1 passes: {}", certify_open(&weak)?.pass);
    Ok(())
}
