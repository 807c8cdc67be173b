//! Continue a periodic curve to a complex strip and measure it in the Banach scale.

use turnwave::diagnostics::energy_distance;
use turnwave::strip::{extend_to_strip, Side};
use turnwave::Curve;

fn main() -> turnwave::Result<()> {
    // z2 = Re rho e^{i a} / (1 - rho e^{i a}) is analytic in |Im a| < ln(1/rho) = 0.69
    let rho: f64 = 0.5;
    let c = Curve::periodic_from_fn(256, |a| (a, (rho * a.cos() - rho * rho) / (1.0 - 2.0 * rho * a.cos() + rho * rho)))?;
    for r in [0.1, 0.3, 0.6, 0.8] {
        match extend_to_strip(&c, r) {
            Ok(s) => {
                let up = s.trace(Side::Upper, 0);
                let max_im = up.z2.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
                println!("r = {r}: ||z||_4 = {:.4e}, max |Im z2| on the upper line {max_im:.3e}, self distance {}", s.banach_norm(4).value, energy_distance(&s, &s, 4)?);
            }
            Err(e) => println!("r = {r}: {e}"),
        }
    }
    Ok(())
}
