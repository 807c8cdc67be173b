//! Convergence order, energy conservation and gauge behavior of the water-wave integrator.

use std::f64::consts::PI;

use turnwave::closures::{Amplitude, PhysicalConstants, WaterWaveSettings};
use turnwave::diagnostics::linear_waterwave_energy;
use turnwave::stepping::{step_rk4, SimState};
use turnwave::Curve;

fn wave(n: usize, a: f64, k: f64, settings: WaterWaveSettings) -> SimState {
    let c = Curve::periodic_from_fn(n, |x| (x, a * (k * x).cos() + 0.3 * a * ((k + 1.0) * x).sin())).unwrap();
    let omega = c.alpha().iter().map(|x| 0.5 * a * (k * x).sin()).collect();
    SimState::water_waves(c, Amplitude::new(omega), PhysicalConstants::default(), 0.0, settings)
}

fn integrate(mut s: SimState, dt: f64, steps: usize) -> SimState {
    for _ in 0..steps {
        s = step_rk4(&s, dt).unwrap();
    }
    s
}

fn max_diff(a: &SimState, b: &SimState) -> f64 {
    let om = |s: &SimState| s.omega.as_ref().unwrap().omega.clone();
    let (wa, wb) = (om(a), om(b));
    (0..a.curve.len())
        .map(|i| {
            (a.curve.z1[i] - b.curve.z1[i])
                .abs()
                .max((a.curve.z2[i] - b.curve.z2[i]).abs())
                .max((wa[i] - wb[i]).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn rk4_is_fourth_order_on_a_nonlinear_wave() {
    let s0 = wave(64, 0.1, 2.0, WaterWaveSettings::default());
    let t = 0.4;
    let runs: Vec<SimState> = [8usize, 16, 32].iter().map(|&m| integrate(s0.clone(), t / m as f64, m)).collect();
    let e1 = max_diff(&runs[0], &runs[1]);
    let e2 = max_diff(&runs[1], &runs[2]);
    let order = (e1 / e2).log2();
    assert!((3.6..4.4).contains(&order), "observed order {order} (differences {e1:.3e}, {e2:.3e})");
}

#[test]
fn linear_energy_drift_per_period_is_small() {
    let (n, k, a) = (256, 8.0, 1e-4);
    let c = Curve::periodic_from_fn(n, |x| (x, a * (k * x).cos())).unwrap();
    let g = PhysicalConstants::default().g;
    let s = SimState::water_waves(c, Amplitude::new(vec![0.0; n]), PhysicalConstants::default(), 1e-13, WaterWaveSettings::default());
    let period = 2.0 * PI / (g * k).sqrt();
    let dt = 1e-3;
    let steps = (period / dt).round() as usize;
    let e0 = linear_waterwave_energy(&s.curve, &s.omega.as_ref().unwrap().omega, g).unwrap();
    let mut st = s;
    let mut drift: f64 = 0.0;
    for i in 1..=steps {
        st = step_rk4(&st, dt).unwrap();
        if i % 100 == 0 || i == steps {
            let e = linear_waterwave_energy(&st.curve, &st.omega.as_ref().unwrap().omega, g).unwrap();
            drift = drift.max((e - e0).abs() / e0);
        }
    }
    assert!(drift < 1e-4, "relative energy drift {drift:.3e} over one period");
}

fn speed_ratio(c: &Curve) -> Vec<f64> {
    let (d1, d2) = c.derivative(1).unwrap();
    let s: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| a.hypot(*b)).collect();
    let len: f64 = s.iter().sum::<f64>() / s.len() as f64;
    s.iter().map(|v| v / len).collect()
}

#[test]
fn arclength_gauge_keeps_speed_ratio_fixed() {
    // start from a uniform arclength parameterization: the flat line, then a slightly tilted mode
    let n = 512;
    let c = Curve::periodic_from_fn(n, |x| (x, 0.0)).unwrap();
    let omega = c.alpha().iter().map(|x| 0.2 * (3.0 * x).sin() + 0.1 * x.cos()).collect();
    let mut s = SimState::water_waves(c, Amplitude::new(omega), PhysicalConstants::default(), 0.0, WaterWaveSettings::default());
    let r0 = speed_ratio(&s.curve);
    let (dt, steps) = (1e-2, 10);
    s = integrate(s, dt, steps);
    let r1 = speed_ratio(&s.curve);
    let drift = r0.iter().zip(&r1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / (dt * steps as f64);
    assert!(drift < 1e-6, "|dz|/L drift {drift:.3e} per unit time");
}

/// Vertical gap between the graph-like curves `a` and `b` at the nodes of `a`.
fn graph_gap(a: &Curve, b: &Curve) -> f64 {
    a.z1.iter()
        .zip(&a.z2)
        .map(|(&x, &y)| {
            // z1_b(alpha) - x is increasing for these near-flat curves
            let (mut lo, mut hi) = (x - 1.0, x + 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if b.eval_periodic(mid).unwrap().0 < x {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (b.eval_periodic(0.5 * (lo + hi)).unwrap().1 - y).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn constant_tangential_offset_only_reparameterizes() {
    let base = WaterWaveSettings::default();
    let shifted = WaterWaveSettings { tangential_offset: 0.3, ..base };
    let (dt, steps) = (5e-3, 20);
    let a = integrate(wave(64, 0.05, 2.0, base), dt, steps);
    let b = integrate(wave(64, 0.05, 2.0, shifted), dt, steps);
    assert!(max_diff(&a, &b) > 1e-4, "offset had no visible effect on the parameterization");
    let d = graph_gap(&a.curve, &b.curve).max(graph_gap(&b.curve, &a.curve));
    assert!(d < 1e-6, "Hausdorff gap {d:.3e} after t = {}", dt * steps as f64);
}
