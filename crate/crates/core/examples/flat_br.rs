//! Birkhoff-Rott on the flat contour reduces to half the Hilbert transform.

use turnwave::singular::birkhoff_rott;
use turnwave::spectral::hilbert;
use turnwave::Curve;

fn main() -> turnwave::Result<()> {
    let n = 256;
    let flat = Curve::periodic_from_fn(n, |a| (a, 0.0))?;
    for k in 1..=8 {
        let w: Vec<f64> = flat.alpha().iter().map(|a| (k as f64 * a).sin()).collect();
        let v = birkhoff_rott(&flat, &w)?;
        let h = hilbert(&w);
        let err = (0..n).map(|i| v.v1[i].abs().max((v.v2[i] - 0.5 * h[i]).abs())).fold(0.0, f64::max);
        println!("k = {k}: max |BR - H/2| = {err:.2e}");
    }
    Ok(())
}
