//! Explicit RK4 stepping with Krasny filtering.

use serde::{Deserialize, Serialize};

use crate::closures::{waterwave_rhs, Amplitude, PhysicalConstants, WaterWaveSettings};
use crate::curve::Curve;
use crate::error::{Result, TurnwaveError};
use crate::singular::{muskat_rhs_open, muskat_rhs_periodic};
use crate::spectral;

pub use crate::spectral::krasny_filter;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Problem {
    /// Open-line contour equation with `rho_jump = (rho2 - rho1) kappa g / mu`.
    MuskatOpen,
    /// Periodic kernel with an explicit prefactor.
    MuskatPeriodic { prefactor: f64 },
    WaterWaves,
}

/// Everything needed to advance the interface one step.
#[derive(Debug, Clone)]
pub struct SimState {
    pub curve: Curve,
    /// Present for water waves only.
    pub omega: Option<Amplitude>,
    pub t: f64,
    pub consts: PhysicalConstants,
    pub filter_threshold: f64,
    pub problem: Problem,
    pub waterwave: WaterWaveSettings,
}

impl SimState {
    pub fn muskat_open(curve: Curve, consts: PhysicalConstants) -> Self {
        Self {
            curve,
            omega: None,
            t: 0.0,
            consts,
            filter_threshold: 0.0,
            problem: Problem::MuskatOpen,
            waterwave: WaterWaveSettings::default(),
        }
    }

    /// Periodic Muskat with the default prefactor `(rho2 - rho1) kappa g / (4 pi mu)`.
    pub fn muskat_periodic(curve: Curve, consts: PhysicalConstants, filter_threshold: f64) -> Self {
        Self {
            curve,
            omega: None,
            t: 0.0,
            consts,
            filter_threshold,
            problem: Problem::MuskatPeriodic { prefactor: consts.periodic_prefactor() },
            waterwave: WaterWaveSettings::default(),
        }
    }

    pub fn water_waves(
        curve: Curve,
        omega: Amplitude,
        consts: PhysicalConstants,
        filter_threshold: f64,
        settings: WaterWaveSettings,
    ) -> Self {
        Self {
            curve,
            omega: Some(omega),
            t: 0.0,
            consts,
            filter_threshold,
            problem: Problem::WaterWaves,
            waterwave: settings,
        }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

/// Time derivatives of the state variables.
#[derive(Debug, Clone)]
pub struct Rates {
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub omega: Option<Vec<f64>>,
}

/// Evaluate the right-hand side of the state's problem.
pub fn rates(state: &SimState) -> Result<Rates> {
    match state.problem {
        Problem::MuskatOpen => {
            let v = muskat_rhs_open(&state.curve, state.consts.muskat_strength())?;
            Ok(Rates { z1: v.v1, z2: v.v2, omega: None })
        }
        Problem::MuskatPeriodic { prefactor } => {
            let v = muskat_rhs_periodic(&state.curve, prefactor)?;
            Ok(Rates { z1: v.v1, z2: v.v2, omega: None })
        }
        Problem::WaterWaves => {
            let om = state
                .omega
                .as_ref()
                .ok_or_else(|| TurnwaveError::InvalidArgument("water-wave state without amplitude".into()))?;
            let r = waterwave_rhs(&state.curve, om, &state.consts, &state.waterwave)?;
            Ok(Rates { z1: r.z1_t, z2: r.z2_t, omega: Some(r.closure.omega_t) })
        }
    }
}

fn axpy(base: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    base.iter().zip(k).map(|(b, v)| b + h * v).collect()
}

fn stage(state: &SimState, k: &Rates, h: f64) -> Result<SimState> {
    let curve = state.curve.with_values(axpy(&state.curve.z1, &k.z1, h), axpy(&state.curve.z2, &k.z2, h));
    let curve = curve.map_err(|_| TurnwaveError::BlowUp { t: state.t, what: "non-finite stage".into() })?;
    let omega = match (&state.omega, &k.omega) {
        (Some(w), Some(kw)) => Some(Amplitude::new(axpy(&w.omega, kw, h))),
        _ => None,
    };
    Ok(SimState { curve, omega, t: state.t + h, ..state.clone() })
}

fn combine(base: &[f64], k: [&[f64]; 4], dt: f64) -> Vec<f64> {
    (0..base.len())
        .map(|i| base[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]))
        .collect()
}

/// Apply the Krasny filter to `z1 - alpha`, `z2` and `omega` of a periodic state.
pub fn filter_state(state: &mut SimState) {
    let thr = state.filter_threshold;
    if thr <= 0.0 || !state.curve.is_periodic() {
        return;
    }
    let alpha = state.curve.alpha().to_vec();
    let p = spectral::filter_samples(&state.curve.p(), thr);
    state.curve.z1 = p.iter().zip(&alpha).map(|(a, b)| a + b).collect();
    state.curve.z2 = spectral::filter_samples(&state.curve.z2, thr);
    if let Some(w) = state.omega.as_mut() {
        w.omega = spectral::filter_samples(&w.omega, thr);
    }
}

/// One RK4 step of signed size `dt`, reusing `k1` when the caller already has it.
///
/// Returns the new state and the `k1` that was used.
pub fn advance(state: &SimState, dt: f64, k1: Option<Rates>) -> Result<(SimState, Rates)> {
    let blow = |e: TurnwaveError| match e {
        TurnwaveError::BlowUp { what, .. } => TurnwaveError::BlowUp { t: state.t, what },
        other => other,
    };
    let k1 = match k1 {
        Some(k) => k,
        None => rates(state).map_err(blow)?,
    };
    let k2 = rates(&stage(state, &k1, 0.5 * dt)?).map_err(blow)?;
    let k3 = rates(&stage(state, &k2, 0.5 * dt)?).map_err(blow)?;
    let k4 = rates(&stage(state, &k3, dt)?).map_err(blow)?;
    let z1 = combine(&state.curve.z1, [&k1.z1, &k2.z1, &k3.z1, &k4.z1], dt);
    let z2 = combine(&state.curve.z2, [&k1.z2, &k2.z2, &k3.z2, &k4.z2], dt);
    let omega = match (&state.omega, &k1.omega, &k2.omega, &k3.omega, &k4.omega) {
        (Some(w), Some(a), Some(b), Some(c), Some(d)) => Some(Amplitude::new(combine(&w.omega, [a, b, c, d], dt))),
        _ => None,
    };
    if z1.iter().chain(&z2).chain(omega.iter().flat_map(|w| w.omega.iter())).any(|v| !v.is_finite()) {
        return Err(TurnwaveError::BlowUp { t: state.t, what: "NaN or Inf in RK4 update".into() });
    }
    let curve = state.curve.with_values(z1, z2)?;
    let mut next = SimState { curve, omega, t: state.t + dt, ..state.clone() };
    filter_state(&mut next);
    Ok((next, k1))
}

/// Classical RK4 step with filtering; `dt` must be positive.
pub fn step_rk4(state: &SimState, dt: f64) -> Result<SimState> {
    if !(dt > 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    Ok(advance(state, dt, None)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_muskat_only_advances_time() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        let s = SimState::muskat_periodic(c.clone(), PhysicalConstants::default(), 1e-12);
        let n = step_rk4(&s, 0.37).unwrap();
        assert_eq!(n.t, 0.37);
        assert!(n.curve.z2.iter().all(|v| v.abs() < 1e-15));
        assert!(n.curve.z1.iter().zip(&c.z1).all(|(a, b)| (a - b).abs() < 1e-14));
    }

    #[test]
    fn rejects_nonpositive_step() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        let s = SimState::muskat_periodic(c, PhysicalConstants::default(), 0.0);
        assert!(step_rk4(&s, 0.0).is_err());
        assert!(step_rk4(&s, -1.0).is_err());
    }

    #[test]
    fn one_step_linear_decay_of_mode_two() {
        let eps = 1e-4;
        let c = Curve::periodic_from_fn(64, |a| (a, eps * (2.0 * a).cos())).unwrap();
        let s = SimState::muskat_periodic(c, PhysicalConstants::default(), 1e-12);
        let n = step_rk4(&s, 1e-3).unwrap();
        let f0 = spectral::fft_real(&s.curve.z2)[2].re;
        let f1 = spectral::fft_real(&n.curve.z2)[2].re;
        // rate strength |k| / 2 = 1 for k = 2; nonlinear corrections are O(eps^2)
        assert!((f1 / f0 - (-1e-3_f64).exp()).abs() < 1e-8, "{}", f1 / f0);
    }
}
