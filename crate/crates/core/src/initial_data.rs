//! Turning data, the sign certificate, mollification, perturbations and the water-wave datum.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closures::{Amplitude, PhysicalConstants, WaterWaveSettings};
use crate::curve::{lagrange_at, Curve, Grid, SLOPE_TOL};
use crate::diagnostics::{sobolev_norm, sobolev_norm_open};
use crate::error::{Result, TurnwaveError};
use crate::singular::{muskat_rhs_open, muskat_rhs_periodic};
use crate::spectral;
use crate::stepping::{advance, rates, SimState};

/// Parameters of the open turning candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningParams {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub b: f64,
    pub cbar: f64,
    pub mollify_tau: f64,
}

impl Default for TurningParams {
    fn default() -> Self {
        Self { beta1: 1.0, beta2: 3.0, beta3: 5.0, b: 5.0, cbar: -0.2, mollify_tau: 0.0 }
    }
}

impl TurningParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.beta1 && self.beta1 < self.beta2 && self.beta2 < self.beta3) {
            return Err(TurnwaveError::InvalidArgument(format!(
                "need 0 < beta1 < beta2 < beta3, got {}, {}, {}",
                self.beta1, self.beta2, self.beta3
            )));
        }
        if !(self.cbar < 0.0) || !(self.b > 0.0) || !(self.mollify_tau >= 0.0) {
            return Err(TurnwaveError::InvalidArgument("need cbar < 0, b > 0, mollify_tau >= 0".into()));
        }
        Ok(())
    }

    /// `z2* = beta (beta1^2 - beta^2) / (1 + beta^4)`.
    pub fn z2_star(&self, beta: f64) -> f64 {
        beta * (self.beta1 * self.beta1 - beta * beta) / (1.0 + beta.powi(4))
    }

    /// Vertical profile: `b z2*` up to `beta2`, quintic blend to `cbar` on `[beta2, beta3]`, odd.
    pub fn z2(&self, beta: f64) -> f64 {
        let a = beta.abs();
        let v = if a <= self.beta2 {
            self.b * self.z2_star(a)
        } else if a < self.beta3 {
            let t = (a - self.beta2) / (self.beta3 - self.beta2);
            let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
            (1.0 - s) * self.b * self.z2_star(a) + s * self.cbar
        } else {
            self.cbar
        };
        beta.signum() * v
    }
}

/// `z1 = beta^3 / (1 + beta^2)`.
pub fn z1_turning(beta: f64) -> f64 {
    beta.powi(3) / (1.0 + beta * beta)
}

pub fn turning_candidate_open(params: &TurningParams, grid: Arc<Grid>) -> Result<Curve> {
    params.validate()?;
    if !matches!(*grid, Grid::Open(_)) {
        return Err(TurnwaveError::InvalidArgument("open candidate needs an open grid".into()));
    }
    let c = Curve::open_from_fn(grid, |b| (z1_turning(b), params.z2(b)))?;
    heat_mollify(&c, params.mollify_tau)
}

/// Periodic analogue: `z1 = alpha - sin alpha`, `z2 = b sin alpha (cos alpha - cos beta1)/(1 - cos beta1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicTurningParams {
    pub beta1: f64,
    pub b: f64,
}

impl Default for PeriodicTurningParams {
    fn default() -> Self {
        Self { beta1: PI / 2.0, b: 4.0 }
    }
}

pub fn turning_candidate_periodic(params: &PeriodicTurningParams, n: usize) -> Result<Curve> {
    let c1 = params.beta1.cos();
    if !(params.beta1 > 0.0 && params.beta1 < PI) || !(params.b > 0.0) {
        return Err(TurnwaveError::InvalidArgument("need 0 < beta1 < pi and b > 0".into()));
    }
    Curve::periodic_from_fn(n, |a| (a - a.sin(), params.b * a.sin() * (a.cos() - c1) / (1.0 - c1)))
}

fn require_turning_shape(curve: &Curve) -> Result<usize> {
    let i0 = curve.grid().origin_index();
    let (d1, _) = curve.derivative(1)?;
    if d1[i0].abs() > 1e-8 {
        return Err(TurnwaveError::Precondition(format!("dz1/dalpha(0) = {:.3e} is not zero", d1[i0])));
    }
    let n = curve.len();
    let scale = curve.z1.iter().chain(&curve.z2).fold(1.0_f64, |m, v| m.max(v.abs()));
    let asym = (0..n).map(|i| (curve.z1[i] + curve.z1[n - 1 - i]).abs() + (curve.z2[i] + curve.z2[n - 1 - i]).abs()).fold(0.0, f64::max);
    if asym > 1e-10 * scale {
        return Err(TurnwaveError::Precondition(format!("curve is not odd (defect {asym:.3e})")));
    }
    Ok(i0)
}

fn open_only(curve: &Curve) -> Result<()> {
    if curve.open_grid().is_none() {
        return Err(TurnwaveError::InvalidArgument("formula is stated for open curves".into()));
    }
    Ok(())
}

/// `4 dz2(0) int_0^inf z1 z2 dz1 / |z|^4 dbeta`, with the flat tail integrated in closed form.
///
/// Uses the unit prefactor, i.e. `rho_jump = 2 pi` in the open kernel.
pub fn dv1_at_zero_reduced(curve: &Curve) -> Result<f64> {
    open_only(curve)?;
    let i0 = require_turning_shape(curve)?;
    let g = curve.open_grid().unwrap();
    let (d1, d2) = curve.derivative(1)?;
    let g0 = d2[i0];
    if g0 == 0.0 {
        return Ok(0.0);
    }
    let n = curve.len();
    let mut sum = 0.0;
    for i in i0 + 1..n {
        let (a, b) = (curve.z1[i], curve.z2[i]);
        let r = a * a + b * b;
        sum += g.weights[i] * a * b * d1[i] / (r * r);
    }
    // integrand vanishes at beta = 0, so the half weight there contributes nothing
    let (_, _, p_r, c) = curve.tail_offsets();
    let u = g.l + p_r;
    Ok(4.0 * g0 * (sum + c / (2.0 * (u * u + c * c))))
}

/// `d/dalpha v1` at 0 before the integration by parts, including tails and the junction term.
pub fn dv1_at_zero_full(curve: &Curve) -> Result<f64> {
    open_only(curve)?;
    let i0 = require_turning_shape(curve)?;
    if curve.z2.iter().all(|v| *v == 0.0) {
        // the curve lies on the axis and the velocity vanishes identically
        return Ok(0.0);
    }
    let g = curve.open_grid().unwrap();
    let (d1, d2) = curve.derivative(1)?;
    let (dd1, _) = curve.derivative(2)?;
    let g0 = d2[i0];
    let n = curve.len();
    let mut sum = 0.0;
    for i in 0..n {
        if i == i0 {
            continue;
        }
        let (a, b) = (curve.z1[i], curve.z2[i]);
        let r = a * a + b * b;
        let f1 = (d1[i] * d1[i] + a * dd1[i]) / r;
        let f2 = -2.0 * a * d1[i] * (a * d1[i] - b * (g0 - d2[i])) / (r * r);
        sum += g.weights[i] * (f1 + f2);
    }
    let (_, _, p_r, c) = curve.tail_offsets();
    let u = g.l + p_r;
    // both tails together: 2 int_u^inf [1/(x^2+c^2) - 2x(x - c g0)/(x^2+c^2)^2] dx
    let tails = 2.0 * (c * g0 - u) / (u * u + c * c);
    let (zl1, zl2) = (curve.z1[n - 1], curve.z2[n - 1]);
    let junction = 2.0 * zl1 * (1.0 - d1[n - 1]) / (zl1 * zl1 + zl2 * zl2);
    Ok(sum + tails + junction)
}

/// `d/dalpha v1` at the origin of a periodic curve from the spectral derivative of the velocity.
pub fn dv1_at_zero_periodic(curve: &Curve, prefactor: f64) -> Result<f64> {
    let v = muskat_rhs_periodic(curve, prefactor)?;
    Ok(spectral::derivative(&v.v1, 1)[curve.grid().origin_index()])
}

/// Machine-checked signs of the turning conditions a–d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningCertificate {
    /// a: `dz1/dalpha(0)`, must vanish.
    pub slope_at_origin: f64,
    /// b: `min dz1/dalpha` away from the origin, must be positive.
    pub min_slope_elsewhere: f64,
    /// c: `dz2/dalpha(0)`, must be positive.
    pub dz2_at_origin: f64,
    /// d: `d/dalpha v1(0)`, must be negative.
    pub dv1: f64,
    pub pass: bool,
}

impl TurningCertificate {
    pub fn new(curve: &Curve, dv1: f64) -> Result<Self> {
        let i0 = curve.grid().origin_index();
        let (d1, d2) = curve.derivative(1)?;
        let min_else = d1.iter().enumerate().filter(|(i, _)| *i != i0).map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
        let pass = d1[i0].abs() <= 1e-8 && min_else > 0.0 && d2[i0] > 0.0 && dv1 < 0.0;
        Ok(Self { slope_at_origin: d1[i0], min_slope_elsewhere: min_else, dz2_at_origin: d2[i0], dv1, pass })
    }

    /// Certificate failure (exit code 4) unless every condition holds.
    pub fn require(self) -> Result<Self> {
        if self.pass {
            Ok(self)
        } else {
            Err(TurnwaveError::Certificate(format!(
                "a: {:.3e}, b: {:.3e}, c: {:.3e}, d: {:.3e}",
                self.slope_at_origin, self.min_slope_elsewhere, self.dz2_at_origin, self.dv1
            )))
        }
    }
}

pub fn certify_open(curve: &Curve) -> Result<TurningCertificate> {
    TurningCertificate::new(curve, dv1_at_zero_reduced(curve)?)
}

pub fn certify_periodic(curve: &Curve, prefactor: f64) -> Result<TurningCertificate> {
    TurningCertificate::new(curve, dv1_at_zero_periodic(curve, prefactor)?)
}

/// Heat-kernel smoothing of the vertical component at time `tau`.
///
/// Periodic curves use the Fourier multiplier; open curves a Simpson quadrature
/// of the Gauss–Weierstrass convolution with flat continuation beyond the ends,
/// followed by exact antisymmetrization when the input is odd.
pub fn heat_mollify(curve: &Curve, tau: f64) -> Result<Curve> {
    if !(tau >= 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("smoothing time must be nonnegative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(curve.clone());
    }
    if curve.is_periodic() {
        return curve.with_values(curve.z1.clone(), spectral::heat_multiplier(&curve.z2, tau));
    }
    let alpha = curve.alpha();
    let n = alpha.len();
    let (lo, hi) = (alpha[0], alpha[n - 1]);
    let z2 = &curve.z2;
    let eval = |x: f64| {
        if x <= lo {
            z2[0]
        } else if x >= hi {
            z2[n - 1]
        } else {
            lagrange_at(alpha, z2, x, 8)
        }
    };
    let sigma = (2.0 * tau).sqrt();
    let m = 256;
    let span = 8.0 * sigma;
    let h = 2.0 * span / m as f64;
    let norm = 1.0 / (4.0 * PI * tau).sqrt();
    let mut out: Vec<f64> = alpha
        .iter()
        .map(|&x| {
            let mut s = 0.0;
            for k in 0..=m {
                let y = -span + k as f64 * h;
                let w = if k == 0 || k == m {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                s += w * eval(x - y) * (-y * y / (4.0 * tau)).exp();
            }
            s * h / 3.0 * norm
        })
        .collect();
    let odd = (0..n).all(|i| z2[i] == -z2[n - 1 - i]);
    if odd {
        for i in 0..n / 2 {
            let v = 0.5 * (out[i] - out[n - 1 - i]);
            out[i] = v;
            out[n - 1 - i] = -v;
        }
        out[n / 2] = 0.0;
    }
    curve.with_values(curve.z1.clone(), out)
}

/// The added field alone, scaled to discrete `H^4` norm `epsilon`.
pub fn h4_perturbation(curve: &Curve, epsilon: f64, seed: u64) -> Result<Vec<f64>> {
    if !(epsilon >= 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = curve.alpha();
    let n = alpha.len();
    let eta: Vec<f64> = if curve.is_periodic() {
        let kmax = (n / 8).clamp(1, 16);
        let coef: Vec<(f64, f64)> = (0..kmax).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        alpha
            .iter()
            .map(|&a| coef.iter().enumerate().map(|(k, (c, s))| { let q = (k + 1) as f64 * a; c * q.cos() + s * q.sin() }).sum())
            .collect()
    } else {
        let coef: Vec<(f64, f64)> = (0..8).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        alpha
            .iter()
            .map(|&a| {
                let env = (-(a / 6.0).powi(2)).exp();
                env * coef.iter().enumerate().map(|(k, (c, s))| { let q = (k + 1) as f64 * a / 4.0; c * q.cos() + s * q.sin() }).sum::<f64>()
            })
            .collect()
    };
    let norm = match curve.open_grid() {
        None => sobolev_norm(&eta, 4)?,
        Some(g) => sobolev_norm_open(g, &eta, 4)?,
    };
    if epsilon == 0.0 || norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    Ok(eta.iter().map(|v| v * epsilon / norm).collect())
}

/// Add a reproducible band-limited perturbation of discrete `H^4` norm `epsilon` to `z2`.
pub fn perturb_h4(curve: &Curve, epsilon: f64, seed: u64) -> Result<Curve> {
    if epsilon == 0.0 {
        return Ok(curve.clone());
    }
    let eta = h4_perturbation(curve, epsilon, seed)?;
    curve.with_values(curve.z1.clone(), curve.z2.iter().zip(&eta).map(|(a, b)| a + b).collect())
}

/// Muskat graph datum `z* - delta G(z*)`: one explicit step back from the turning curve.
pub fn muskat_turning_datum(state_star: &SimState, delta: f64) -> Result<SimState> {
    if !(delta > 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let v = rates(state_star)?;
    let c = &state_star.curve;
    let curve = c.with_values(
        c.z1.iter().zip(&v.z1).map(|(a, b)| a - delta * b).collect(),
        c.z2.iter().zip(&v.z2).map(|(a, b)| a - delta * b).collect(),
    )?;
    let slope = curve.min_slope()?;
    if slope.min_slope <= SLOPE_TOL {
        return Err(TurnwaveError::DeltaTooLarge { min_slope: slope.min_slope });
    }
    Ok(SimState { curve, t: 0.0, ..state_star.clone() })
}

/// Open Muskat velocity with the unit prefactor used by the dv1 formulas.
pub fn unit_open_velocity(curve: &Curve) -> Result<Vec<f64>> {
    Ok(muskat_rhs_open(curve, 2.0 * PI)?.v1)
}

/// Water-wave graph datum: `omega* = dz1*/dalpha`, integrated backward by `delta`.
pub fn waterwave_datum(
    curve_star: &Curve,
    delta: f64,
    consts: &PhysicalConstants,
    settings: &WaterWaveSettings,
    dt: f64,
    filter_threshold: f64,
) -> Result<(Curve, Amplitude)> {
    if !(delta > 0.0) || !(dt > 0.0) {
        return Err(TurnwaveError::InvalidArgument("delta and dt must be positive".into()));
    }
    let (d1, _) = curve_star.derivative(1)?;
    let mut state =
        SimState::water_waves(curve_star.clone(), Amplitude::new(d1), *consts, filter_threshold, *settings);
    let steps = (delta / dt).ceil() as usize;
    let h = delta / steps as f64;
    for _ in 0..steps {
        state = advance(&state, -h, None)?.0;
    }
    let slope = state.curve.min_slope()?;
    if slope.min_slope <= SLOPE_TOL {
        return Err(TurnwaveError::DeltaTooLarge { min_slope: slope.min_slope });
    }
    state.curve.as_graph().map_err(|_| TurnwaveError::DeltaTooLarge { min_slope: slope.min_slope })?;
    let omega = state.omega.take().expect("water-wave state carries omega");
    Ok((state.curve, omega))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_grid(n: usize) -> Arc<Grid> {
        Grid::open(n, 40.0, 5.0).unwrap()
    }

    #[test]
    fn candidate_satisfies_a_b_c() {
        let p = TurningParams::default();
        let c = turning_candidate_open(&p, open_grid(512)).unwrap();
        let cert = TurningCertificate::new(&c, -1.0).unwrap();
        assert!(cert.slope_at_origin.abs() < 1e-12);
        assert!(cert.min_slope_elsewhere > 0.0);
        assert!((cert.dz2_at_origin - p.b * p.beta1 * p.beta1).abs() < 1e-6);
    }

    #[test]
    fn reduced_and_full_agree_on_default() {
        let c = turning_candidate_open(&TurningParams::default(), open_grid(1024)).unwrap();
        let r = dv1_at_zero_reduced(&c).unwrap();
        let f = dv1_at_zero_full(&c).unwrap();
        assert!(r < 0.0);
        assert!(((r - f) / r).abs() < 1e-6, "{r} {f}");
    }

    #[test]
    fn flat_vertical_component_gives_zero() {
        let c = Curve::open_from_fn(open_grid(256), |b| (z1_turning(b), 0.0)).unwrap();
        assert_eq!(dv1_at_zero_reduced(&c).unwrap(), 0.0);
        assert_eq!(dv1_at_zero_full(&c).unwrap(), 0.0);
    }

    #[test]
    fn full_formula_matches_velocity_derivative() {
        let c = turning_candidate_open(&TurningParams::default(), open_grid(1024)).unwrap();
        let v1 = unit_open_velocity(&c).unwrap();
        let g = c.open_grid().unwrap();
        let fd = g.diff(&v1, 1)[g.center()];
        let f = dv1_at_zero_full(&c).unwrap();
        assert!((fd - f).abs() < 1e-4 * f.abs(), "{fd} {f}");
    }

    #[test]
    fn periodic_heat_is_exact() {
        let c = Curve::periodic_from_fn(32, |a| (a, a.cos())).unwrap();
        let m = heat_mollify(&c, 1.0).unwrap();
        for (v, a) in m.z2.iter().zip(c.alpha()) {
            assert!((v - (-1.0_f64).exp() * a.cos()).abs() < 1e-15);
        }
        assert_eq!(heat_mollify(&c, 0.0).unwrap().z2, c.z2);
    }

    #[test]
    fn perturbation_has_exact_norm() {
        let c = turning_candidate_periodic(&PeriodicTurningParams::default(), 128).unwrap();
        let eta = h4_perturbation(&c, 1e-3, 7).unwrap();
        assert!((sobolev_norm(&eta, 4).unwrap() - 1e-3).abs() < 1e-15);
        assert_eq!(perturb_h4(&c, 1e-3, 7).unwrap().z2, perturb_h4(&c, 1e-3, 7).unwrap().z2);
        assert_eq!(perturb_h4(&c, 0.0, 7).unwrap().z2, c.z2);
    }

    #[test]
    fn periodic_candidate_certifies() {
        let c = turning_candidate_periodic(&PeriodicTurningParams::default(), 128).unwrap();
        let cert = certify_periodic(&c, PhysicalConstants::default().periodic_prefactor()).unwrap();
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn sign_threshold_in_b() {
        // regression value from bisection of the reduced quadrature, N = 1024
        let g = open_grid(1024);
        let f = |b: f64| {
            let c = turning_candidate_open(&TurningParams { b, ..Default::default() }, g.clone()).unwrap();
            dv1_at_zero_reduced(&c).unwrap()
        };
        let (mut lo, mut hi) = (0.5, 10.0);
        for _ in 0..50 {
            let m = 0.5 * (lo + hi);
            if f(m) < 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        assert!((hi - 2.048_139_246).abs() < 1e-6, "{hi}");
        assert!(f(10.0 * hi) < 0.0);
    }

    #[test]
    fn mollified_candidate_still_certifies() {
        let p = TurningParams { mollify_tau: 1e-4, ..Default::default() };
        let c = turning_candidate_open(&p, open_grid(512)).unwrap();
        assert!(certify_open(&c).unwrap().pass);
        let n = c.len();
        assert!((0..n).all(|i| c.z2[i] == -c.z2[n - 1 - i]));
    }
}
