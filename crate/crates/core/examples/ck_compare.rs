//! Strip successive approximations against the real-space integrator on a stable datum.

use turnwave::closures::PhysicalConstants;
use turnwave::continuation::{ck_solve, CkOptions};
use turnwave::driver::{run, RunOptions};
use turnwave::stepping::SimState;
use turnwave::strip::extend_to_strip;
use turnwave::Curve;

fn main() -> turnwave::Result<()> {
    let a = 0.05;
    let c = Curve::periodic_from_fn(128, |x| (x, a * x.cos() + 0.5 * a * (2.0 * x).sin()))?;
    let consts = PhysicalConstants::default();
    let opts = CkOptions { prefactor: consts.periodic_prefactor(), ..CkOptions::default() };
    let ck = ck_solve(&extend_to_strip(&c, opts.r0)?, &opts)?;
    println!("iterations {}, ratios {:?}", ck.iterations(), ck.ratios().iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>());

    let run_opts = RunOptions { t_end: opts.t_final, dt: opts.t_final / 256.0, snapshot_every: 256, stop: Default::default(), mode_probe: None };
    let reference = run(SimState::muskat_periodic(c, consts, 1e-12), &run_opts).map_err(|f| f.error)?.trajectory.final_state.curve;
    let strip = ck.last().real_curve()?;
    let d = (0..strip.len())
        .map(|i| (strip.z1[i] - reference.z1[i]).hypot(strip.z2[i] - reference.z2[i]))
        .fold(0.0, f64::max);
    println!("max node distance at t = {}: {d:.2e}", opts.t_final);
    Ok(())
}
