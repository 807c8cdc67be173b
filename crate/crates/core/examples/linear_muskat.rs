//! Small Fourier modes of a stable Muskat interface decay like exp(-|k| t / 2).

use turnwave::closures::PhysicalConstants;
use turnwave::driver::{run, RunOptions};
use turnwave::stepping::SimState;
use turnwave::Curve;

fn main() -> turnwave::Result<()> {
    let consts = PhysicalConstants::default();
    for k in [1usize, 2, 4] {
        let a0 = 1e-4;
        let c = Curve::periodic_from_fn(128, |x| (x, a0 * (k as f64 * x).cos()))?;
        let opts = RunOptions { t_end: 1.0, dt: 1e-2, snapshot_every: 100, stop: Default::default(), mode_probe: Some(k) };
        let out = run(SimState::muskat_periodic(c, consts, 1e-12), &opts).map_err(|f| f.error)?;
        let last = out.trajectory.diagnostics.last().expect("rows");
        let rate = -(last.mode_amp.expect("probed") / a0).ln() / last.t;
        let theory = consts.muskat_strength() * k as f64 / 2.0;
        println!("k = {k}: rate {rate:.8} vs {theory:.8}");
    }
    Ok(())
}
