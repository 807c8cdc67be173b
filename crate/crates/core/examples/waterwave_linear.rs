//! Linear water waves: frequency sqrt(g k) and conserved quadratic energy.

use std::f64::consts::PI;

use turnwave::closures::{Amplitude, PhysicalConstants, WaterWaveSettings};
use turnwave::diagnostics::linear_waterwave_energy;
use turnwave::driver::{run, RunOptions};
use turnwave::stepping::SimState;
use turnwave::Curve;

fn main() -> turnwave::Result<()> {
    let consts = PhysicalConstants::default();
    let (n, k, a) = (64, 2usize, 1e-5);
    let c = Curve::periodic_from_fn(n, |x| (x, a * (k as f64 * x).cos()))?;
    let state = SimState::water_waves(c, Amplitude::new(vec![0.0; n]), consts, 1e-13, WaterWaveSettings::default());
    let period = 2.0 * PI / (consts.g * k as f64).sqrt();
    let opts = RunOptions { t_end: period, dt: 1e-2, snapshot_every: 10, stop: Default::default(), mode_probe: Some(k) };
    let out = run(state, &opts).map_err(|f| f.error)?;
    let e: Vec<f64> = out
        .trajectory
        .snapshots
        .iter()
        .map(|s| linear_waterwave_energy(&s.curve, s.omega.as_deref().unwrap_or(&[]), consts.g))
        .collect::<turnwave::Result<_>>()?;
    let drift = e.iter().map(|v| (v - e[0]).abs()).fold(0.0, f64::max) / e[0];
    let last = out.trajectory.diagnostics.last().expect("rows");
    println!("after one period: mode amplitude {:.6e} (start {a:.1e}), energy drift {drift:.2e}", last.mode_amp.unwrap_or(f64::NAN));
    Ok(())
}
