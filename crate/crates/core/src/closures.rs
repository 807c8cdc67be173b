//! Physics closures: Darcy and Euler amplitudes plus the tangential speed.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Result, TurnwaveError};
use crate::singular::{birkhoff_rott_curve_derivative, BrMatrix, PairTable, Velocity};
use crate::spectral;

/// Fluid constants. Only the combination `(rho2 - rho1) kappa g / mu` enters Muskat.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub rho1: f64,
    pub rho2: f64,
    pub g: f64,
    pub mu: f64,
    pub kappa: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { rho1: 0.0, rho2: 1.0, g: 1.0, mu: 1.0, kappa: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.mu > 0.0 && self.kappa > 0.0) {
            return Err(TurnwaveError::Config(format!(
                "physics constants g, mu, kappa must be positive (g={}, mu={}, kappa={})",
                self.g, self.mu, self.kappa
            )));
        }
        Ok(())
    }

    /// `(rho2 - rho1) kappa g / mu`.
    pub fn muskat_strength(&self) -> f64 {
        (self.rho2 - self.rho1) * self.kappa * self.g / self.mu
    }

    /// Default periodic prefactor, chosen so small modes decay at `strength |k| / 2`.
    pub fn periodic_prefactor(&self) -> f64 {
        self.muskat_strength() / (4.0 * PI)
    }

    pub fn swapped(&self) -> Self {
        Self { rho1: self.rho2, rho2: self.rho1, ..*self }
    }
}

/// Vorticity amplitude samples co-located with a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub omega: Vec<f64>,
}

impl Amplitude {
    pub fn new(omega: Vec<f64>) -> Self {
        Self { omega }
    }
}

/// `omega = -(rho2 - rho1)(kappa g / mu) dz2/dalpha`.
pub fn darcy_amplitude(curve: &Curve, consts: &PhysicalConstants) -> Result<Amplitude> {
    let (_, d2) = curve.derivative(1)?;
    let s = consts.muskat_strength();
    Ok(Amplitude::new(d2.into_iter().map(|v| -s * v).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangentialGauge {
    /// Keeps `|dz|/L` fixed in time, so a uniform parameterization stays uniform.
    ArclengthPreserving,
    /// No tangential term (the Muskat contour equation carries its own).
    Zero,
}

/// Tangential speed `c(alpha)` for `z_t = BR + c dz`.
pub fn tangential_speed(curve: &Curve, velocity: &Velocity, gauge: TangentialGauge) -> Result<Vec<f64>> {
    let n = curve.len();
    if gauge == TangentialGauge::Zero {
        return Ok(vec![0.0; n]);
    }
    if !curve.is_periodic() {
        return Err(TurnwaveError::InvalidArgument("tangential speed needs a periodic curve".into()));
    }
    let (d1, d2) = curve.derivative(1)?;
    let db1 = spectral::derivative(&velocity.v1, 1);
    let db2 = spectral::derivative(&velocity.v2, 1);
    Ok(arclength_gauge(&d1, &d2, &db1, &db2))
}

fn arclength_gauge(d1: &[f64], d2: &[f64], db1: &[f64], db2: &[f64]) -> Vec<f64> {
    let n = d1.len();
    let s: Vec<f64> = (0..n).map(|i| d1[i].hypot(d2[i])).collect();
    let q: Vec<f64> = (0..n).map(|i| (d1[i] * db1[i] + d2[i] * db2[i]) / s[i]).collect();
    let len: f64 = s.iter().sum();
    let len_t: f64 = q.iter().sum();
    let rate = len_t / len;
    let rhs: Vec<f64> = (0..n).map(|i| s[i] * rate - q[i]).collect();
    let cs = spectral::antiderivative_mean_zero(&rhs);
    (0..n).map(|i| cs[i] / s[i]).collect()
}

/// Sign convention of the gravity term in the amplitude equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GravityConvention {
    /// `-2 g dz2`: stable dispersion `f_tt = -g |k| f` with the BR orientation used here.
    Dispersive,
    /// `+2 g dz2` as commonly printed; unstable with this orientation.
    Printed,
}

impl GravityConvention {
    fn sign(self) -> f64 {
        match self {
            GravityConvention::Dispersive => -1.0,
            GravityConvention::Printed => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureSolver {
    /// Fixed-point iteration only; failure is an error.
    Picard,
    /// Dense LU solve of the linear system.
    Dense,
    /// Picard, switching to the dense solve when it would not converge in time.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterWaveSettings {
    pub gauge: TangentialGauge,
    /// Constant added to the tangential speed.
    pub tangential_offset: f64,
    pub solver: ClosureSolver,
    pub gravity: GravityConvention,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for WaterWaveSettings {
    fn default() -> Self {
        Self {
            gauge: TangentialGauge::ArclengthPreserving,
            tangential_offset: 0.0,
            solver: ClosureSolver::Auto,
            gravity: GravityConvention::Dispersive,
            tol: 1e-12,
            max_iter: 100,
        }
    }
}

/// Solution of the implicit amplitude equation.
#[derive(Debug, Clone)]
pub struct AmplitudeRate {
    pub omega_t: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual of `omega_t + 2 BR(omega_t) . dz - R0`.
    pub residual: f64,
    pub used_dense: bool,
}

/// Full water-wave right-hand side.
#[derive(Debug, Clone)]
pub struct WaterWaveRates {
    pub z1_t: Vec<f64>,
    pub z2_t: Vec<f64>,
    pub c: Vec<f64>,
    pub closure: AmplitudeRate,
}

struct Geometry {
    d1: Vec<f64>,
    d2: Vec<f64>,
    table: PairTable,
    br: BrMatrix,
}

impl Geometry {
    fn new(curve: &Curve) -> Result<Self> {
        if !curve.is_periodic() {
            return Err(TurnwaveError::InvalidArgument("water waves are periodic only".into()));
        }
        if curve.len() % 2 != 0 {
            return Err(TurnwaveError::OddGrid(curve.len()));
        }
        let (d1, d2) = curve.derivative(1)?;
        let table = PairTable::new(curve)?;
        let br = BrMatrix::new(&table);
        Ok(Self { d1, d2, table, br })
    }

    /// `2 BR(w) . dz`, the part of the amplitude equation linear in `omega_t`.
    fn coupling(&self, w: &[f64]) -> Vec<f64> {
        let (b1, b2) = self.br.apply(w);
        (0..w.len()).map(|i| 2.0 * (b1[i] * self.d1[i] + b2[i] * self.d2[i])).collect()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Amplitude time derivative for water waves.
///
/// The time derivative of BR contains `omega_t` under the integral, so
/// `omega_t + 2 BR(omega_t) . dz = R0` is solved, where `R0` collects the curve
/// motion term `-2 (dBR/dz)[z_t] . dz`, the Bernoulli terms and gravity.
pub fn waterwave_amplitude_rhs(
    curve: &Curve,
    omega: &Amplitude,
    c: &[f64],
    consts: &PhysicalConstants,
    settings: &WaterWaveSettings,
) -> Result<AmplitudeRate> {
    let geo = Geometry::new(curve)?;
    let (b1, b2) = geo.br.apply(&omega.omega);
    amplitude_rate(&geo, &omega.omega, &b1, &b2, c, consts, settings)
}

fn amplitude_rate(
    geo: &Geometry,
    w: &[f64],
    b1: &[f64],
    b2: &[f64],
    c: &[f64],
    consts: &PhysicalConstants,
    settings: &WaterWaveSettings,
) -> Result<AmplitudeRate> {
    let n = w.len();
    let (d1, d2) = (&geo.d1, &geo.d2);
    let db1 = spectral::derivative(b1, 1);
    let db2 = spectral::derivative(b2, 1);
    let zt1: Vec<f64> = (0..n).map(|i| b1[i] + c[i] * d1[i]).collect();
    let zt2: Vec<f64> = (0..n).map(|i| b2[i] + c[i] * d2[i]).collect();
    let (bz1, bz2) = birkhoff_rott_curve_derivative(&geo.table, w, &zt1, &zt2);
    let bern: Vec<f64> = (0..n).map(|i| w[i] * w[i] / (4.0 * (d1[i] * d1[i] + d2[i] * d2[i]))).collect();
    let dbern = spectral::derivative(&bern, 1);
    let cw: Vec<f64> = (0..n).map(|i| c[i] * w[i]).collect();
    let dcw = spectral::derivative(&cw, 1);
    let gs = settings.gravity.sign() * 2.0 * consts.g;
    let r0: Vec<f64> = (0..n)
        .map(|i| {
            -2.0 * (bz1[i] * d1[i] + bz2[i] * d2[i]) - dbern[i]
                + dcw[i]
                + 2.0 * c[i] * (db1[i] * d1[i] + db2[i] * d2[i])
                + gs * d2[i]
        })
        .collect();
    solve_closure(geo, &r0, settings)
}

fn dense_solve(geo: &Geometry, r0: &[f64]) -> Result<Vec<f64>> {
    let n = r0.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let k = i * n + j;
            let mut v = 2.0 * (geo.d1[i] * geo.br.k1[k] + geo.d2[i] * geo.br.k2[k]);
            if i == j {
                v += 1.0;
            }
            m[(i, j)] = v;
        }
    }
    let rhs = DVector::from_column_slice(r0);
    m.lu()
        .solve(&rhs)
        .map(|x| x.iter().copied().collect())
        .ok_or(TurnwaveError::ClosureIteration { iterations: 0, residual: f64::INFINITY })
}

fn solve_closure(geo: &Geometry, r0: &[f64], settings: &WaterWaveSettings) -> Result<AmplitudeRate> {
    let n = r0.len();
    let residual_of = |x: &[f64]| {
        let cpl = geo.coupling(x);
        (0..n).map(|i| (x[i] + cpl[i] - r0[i]).abs()).fold(0.0, f64::max)
    };
    if settings.solver == ClosureSolver::Dense {
        let x = dense_solve(geo, r0)?;
        let residual = residual_of(&x);
        return Ok(AmplitudeRate { omega_t: x, iterations: 0, residual, used_dense: true });
    }
    let scale = max_abs(r0).max(1.0);
    let mut x = r0.to_vec();
    let mut prev_diff = f64::INFINITY;
    let mut diff = f64::INFINITY;
    let mut it = 0;
    while it < settings.max_iter {
        it += 1;
        let cpl = geo.coupling(&x);
        let next: Vec<f64> = (0..n).map(|i| r0[i] - cpl[i]).collect();
        diff = (0..n).map(|i| (next[i] - x[i]).abs()).fold(0.0, f64::max);
        x = next;
        if diff < settings.tol * scale {
            let residual = residual_of(&x);
            return Ok(AmplitudeRate { omega_t: x, iterations: it, residual, used_dense: false });
        }
        if settings.solver == ClosureSolver::Auto && it >= 8 {
            let ratio = diff / prev_diff;
            let needed = if ratio < 1.0 {
                ((settings.tol * scale / diff).ln() / ratio.ln()).ceil()
            } else {
                f64::INFINITY
            };
            if needed > (settings.max_iter - it) as f64 {
                break;
            }
        }
        prev_diff = diff;
    }
    if settings.solver == ClosureSolver::Auto {
        let x = dense_solve(geo, r0)?;
        let residual = residual_of(&x);
        return Ok(AmplitudeRate { omega_t: x, iterations: it, residual, used_dense: true });
    }
    Err(TurnwaveError::ClosureIteration { iterations: it, residual: diff })
}

/// Curve velocity `BR + c dz` and amplitude rate for the water-wave system.
pub fn waterwave_rhs(
    curve: &Curve,
    omega: &Amplitude,
    consts: &PhysicalConstants,
    settings: &WaterWaveSettings,
) -> Result<WaterWaveRates> {
    let geo = Geometry::new(curve)?;
    let n = curve.len();
    let (b1, b2) = geo.br.apply(&omega.omega);
    let mut c = match settings.gauge {
        TangentialGauge::Zero => vec![0.0; n],
        TangentialGauge::ArclengthPreserving => {
            let db1 = spectral::derivative(&b1, 1);
            let db2 = spectral::derivative(&b2, 1);
            arclength_gauge(&geo.d1, &geo.d2, &db1, &db2)
        }
    };
    c.iter_mut().for_each(|v| *v += settings.tangential_offset);
    let closure = amplitude_rate(&geo, &omega.omega, &b1, &b2, &c, consts, settings)?;
    let z1_t = (0..n).map(|i| b1[i] + c[i] * geo.d1[i]).collect();
    let z2_t = (0..n).map(|i| b2[i] + c[i] * geo.d2[i]).collect();
    Ok(WaterWaveRates { z1_t, z2_t, c, closure })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn darcy_on_sine() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.01 * a.sin())).unwrap();
        let w = darcy_amplitude(&c, &PhysicalConstants::default()).unwrap();
        for (i, a) in c.alpha().iter().enumerate() {
            assert!((w.omega[i] + 0.01 * a.cos()).abs() < 1e-15);
        }
        let flat = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        assert!(darcy_amplitude(&flat, &PhysicalConstants::default()).unwrap().omega.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn darcy_flips_with_densities() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.2 * (2.0 * a).cos())).unwrap();
        let k = PhysicalConstants { rho1: 0.3, rho2: 1.7, ..Default::default() };
        let a = darcy_amplitude(&c, &k).unwrap();
        let b = darcy_amplitude(&c, &k.swapped()).unwrap();
        assert!(a.omega.iter().zip(&b.omega).all(|(x, y)| (x + y).abs() < 1e-15));
    }

    #[test]
    fn flat_rest_state() {
        let flat = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        let w = Amplitude::new(vec![0.0; 64]);
        let r = waterwave_amplitude_rhs(&flat, &w, &[0.0; 64], &PhysicalConstants::default(), &Default::default())
            .unwrap();
        assert!(r.omega_t.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn gravity_term_at_first_order() {
        let eps = 1e-7;
        let k = 3.0;
        let c = Curve::periodic_from_fn(128, |a| (a, eps * (k * a).sin())).unwrap();
        let w = Amplitude::new(vec![0.0; 128]);
        let consts = PhysicalConstants { g: 2.0, ..Default::default() };
        for (conv, sign) in [(GravityConvention::Printed, 1.0), (GravityConvention::Dispersive, -1.0)] {
            let s = WaterWaveSettings { gravity: conv, ..Default::default() };
            let r = waterwave_amplitude_rhs(&c, &w, &[0.0; 128], &consts, &s).unwrap();
            for (i, a) in c.alpha().iter().enumerate() {
                let expect = sign * 2.0 * 2.0 * eps * k * (k * a).cos();
                assert!((r.omega_t[i] - expect).abs() < 1e-12 * eps.max(1.0) + 1e-3 * eps, "{i}");
            }
        }
    }

    #[test]
    fn flat_tangential_speed_vanishes() {
        let flat = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        let om: Vec<f64> = flat.alpha().iter().map(|a| (2.0 * a).sin()).collect();
        let v = crate::singular::birkhoff_rott(&flat, &om).unwrap();
        let c = tangential_speed(&flat, &v, TangentialGauge::ArclengthPreserving).unwrap();
        assert!(c.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn picard_and_dense_agree_and_satisfy_residual() {
        let c = Curve::periodic_from_fn(128, |a| (a - 0.3 * a.sin(), 0.4 * (2.0 * a).sin())).unwrap();
        let w = Amplitude::new(c.alpha().iter().map(|a| 0.5 * (1.0 - a.cos())).collect());
        let zero = vec![0.0; 128];
        let k = PhysicalConstants::default();
        let p = WaterWaveSettings { solver: ClosureSolver::Picard, ..Default::default() };
        let d = WaterWaveSettings { solver: ClosureSolver::Dense, ..Default::default() };
        let rp = waterwave_amplitude_rhs(&c, &w, &zero, &k, &p).unwrap();
        let rd = waterwave_amplitude_rhs(&c, &w, &zero, &k, &d).unwrap();
        assert!(rp.residual < 1e-10, "{}", rp.residual);
        assert!(rd.residual < 1e-10, "{}", rd.residual);
        let gap = rp.omega_t.iter().zip(&rd.omega_t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-10, "{gap}");
    }
}
