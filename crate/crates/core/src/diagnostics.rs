//! Rayleigh–Taylor functions, Sobolev and strip norms, weight functions, energy distances.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closures::PhysicalConstants;
use crate::continuation::strip_arc_chord_sup;
use crate::curve::{Curve, OpenGrid};
use crate::error::{Result, TurnwaveError};
use crate::quadrature::fornberg_weights;
use crate::spectral::{self, wavenumber};
use crate::strip::{Side, StripCurve, StripWidth};

/// Maximal runs of negative entries as `(start, len)`; runs may wrap when periodic.
pub fn negative_runs(sigma: &[f64], periodic: bool) -> Vec<(usize, usize)> {
    let n = sigma.len();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < n {
        if sigma[i] < 0.0 {
            let s = i;
            while i < n && sigma[i] < 0.0 {
                i += 1;
            }
            runs.push((s, i - s));
        } else {
            i += 1;
        }
    }
    if periodic && runs.len() > 1 {
        let (s0, l0) = runs[0];
        let (sl, ll) = *runs.last().unwrap();
        if s0 == 0 && sl + ll == n {
            runs.pop();
            runs[0] = (sl, ll + l0);
        }
    }
    runs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RTReport {
    pub sigma: Vec<f64>,
    pub negative_intervals: Vec<(f64, f64)>,
    pub min_sigma: f64,
}

/// Sign proxy `(rho2 - rho1) dz1/dalpha` with its negative runs.
pub fn sigma_muskat(curve: &Curve, consts: &PhysicalConstants) -> Result<RTReport> {
    let (d1, _) = curve.derivative(1)?;
    let jump = consts.rho2 - consts.rho1;
    let sigma: Vec<f64> = d1.iter().map(|v| jump * v).collect();
    let alpha = curve.alpha();
    let n = alpha.len();
    let negative_intervals = negative_runs(&sigma, curve.is_periodic())
        .into_iter()
        .map(|(s, l)| (alpha[s], alpha[(s + l - 1) % n]))
        .collect();
    let min_sigma = sigma.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(RTReport { sigma, negative_intervals, min_sigma })
}

/// `sigma_1^0 = -2 pi dz1 / |dz|^2` at the nodes.
pub fn sigma10(curve: &Curve) -> Result<Vec<f64>> {
    let (d1, d2) = curve.derivative(1)?;
    let alpha = curve.alpha();
    d1.iter()
        .zip(&d2)
        .enumerate()
        .map(|(j, (a, b))| {
            let q = a * a + b * b;
            if q < 1e-14 {
                Err(TurnwaveError::SingularParameterization { alpha: alpha[j] })
            } else {
                Ok(-2.0 * PI * a / q)
            }
        })
        .collect()
}

/// `(||f||^2 + ||d^k f||^2)^{1/2}` on the periodic line, computed from Fourier coefficients.
pub fn sobolev_norm(samples: &[f64], k: u32) -> Result<f64> {
    let n = samples.len();
    if n == 0 {
        return Err(TurnwaveError::InvalidArgument("empty samples".into()));
    }
    let c = spectral::fft_real(samples);
    let s: f64 = c
        .iter()
        .enumerate()
        .map(|(i, v)| (v.norm_sqr() / (n * n) as f64) * (1.0 + wavenumber(i, n).abs().powi(2 * k as i32)))
        .sum();
    Ok((2.0 * PI * s).sqrt())
}

/// Whether `k` derivatives are resolved on `n` points (`k <= n/4`).
pub fn sobolev_resolved(n: usize, k: u32) -> bool {
    (k as usize) * 4 <= n
}

/// Same norm on a truncated open grid: quadrature weights and one-sided stencils.
pub fn sobolev_norm_open(grid: &OpenGrid, f: &[f64], k: u32) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(TurnwaveError::InvalidArgument("sample count does not match grid".into()));
    }
    let dk = if k == 0 { f.to_vec() } else { grid.diff(f, k as usize) };
    let s: f64 = f.iter().zip(&dk).zip(&grid.weights).map(|((a, b), w)| w * (a * a + b * b)).sum();
    Ok(s.sqrt())
}

/// Which printed variant of the short-time weight to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum HbarForm {
    /// `sin^2(x/2)`: periodic and nonnegative.
    #[default]
    Squared,
    /// `sin(x/2)` exactly as printed.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub a: f64,
    pub tau: f64,
    pub hbar: HbarForm,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self { a: 100.0, tau: 0.05, hbar: HbarForm::Squared }
    }
}

impl WeightParams {
    pub fn new(a: f64, tau: f64) -> Result<Self> {
        if !(a > 0.0) || !(tau > 0.0) {
            return Err(TurnwaveError::InvalidArgument(format!("weights need A > 0 and tau > 0, got {a}, {tau}")));
        }
        Ok(Self { a, tau, hbar: HbarForm::Squared })
    }

    /// Soft range checks: `A >= 1`, `0 < tau <= 1`, and the sign of `h`.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.a < 1.0 {
            w.push(format!("A = {} below 1", self.a));
        }
        if self.tau > 1.0 {
            w.push(format!("tau = {} above 1", self.tau));
        }
        if !self.h_nonnegative() {
            w.push(format!("h takes negative values for A = {}, tau = {}", self.a, self.tau));
        }
        w
    }

    /// Exact condition for `h >= 0` on its window: `A^{-1}(1 + tau^2 - tau^4) >= tau - tau^2`.
    ///
    /// `h` is affine in `sin^2` and concave in `t`, so the minimum sits at `x = pi`, `t = tau^2`.
    pub fn h_nonnegative(&self) -> bool {
        let (ai, t) = (1.0 / self.a, self.tau);
        ai * (1.0 + t * t - t.powi(4)) >= t - t * t
    }
}

/// Weight value with its analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightValue {
    pub value: f64,
    pub dt: f64,
    pub dx: f64,
}

/// `h = A^{-1}(tau^2 - t^2) + (A^{-1} - (tau - t)) sin^2(x/2)` on `[tau^2, tau]`.
pub fn weight_h(x: f64, t: f64, p: &WeightParams) -> Result<WeightValue> {
    let (lo, hi) = (p.tau * p.tau, p.tau);
    if !(t >= lo && t <= hi) {
        return Err(TurnwaveError::Domain { t, lo, hi });
    }
    let ai = 1.0 / p.a;
    let s = (0.5 * x).sin();
    let coef = ai - (p.tau - t);
    Ok(WeightValue {
        value: ai * (p.tau * p.tau - t * t) + coef * s * s,
        dt: -2.0 * ai * t + s * s,
        dx: coef * 0.5 * x.sin(),
    })
}

/// `hbar = (A^{-1} tau^2 + A^{-1} s)/4 + A^{-2} tau t + A t s` on `[0, tau^2]`, `s = sin^2(x/2)` by default.
pub fn weight_hbar(x: f64, t: f64, p: &WeightParams) -> Result<WeightValue> {
    let (lo, hi) = (0.0, p.tau * p.tau);
    if !(t >= lo && t <= hi) {
        return Err(TurnwaveError::Domain { t, lo, hi });
    }
    let ai = 1.0 / p.a;
    let (s, ds) = match p.hbar {
        HbarForm::Squared => ((0.5 * x).sin().powi(2), 0.5 * x.sin()),
        HbarForm::Literal => ((0.5 * x).sin(), 0.5 * (0.5 * x).cos()),
    };
    Ok(WeightValue {
        value: 0.25 * (ai * p.tau * p.tau + ai * s) + ai * ai * p.tau * t + p.a * t * s,
        dt: ai * ai * p.tau + p.a * s,
        dx: (0.25 * ai + p.a * t) * ds,
    })
}

/// Samples of `sigma_1^0` on a uniform `x` grid at increasing times (time measured from the turning point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sigma10Field {
    pub x: Vec<f64>,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl Sigma10Field {
    pub fn from_curves(curves: &[(f64, Curve)]) -> Result<Self> {
        let first = curves.first().ok_or_else(|| TurnwaveError::MissingCoverage("no snapshots".into()))?;
        let x = first.1.alpha().to_vec();
        let values = curves.par_iter().map(|(_, c)| sigma10(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self { x, times: curves.iter().map(|c| c.0).collect(), values })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedRtReport {
    /// min of `sigma + d_t h - A^{1/2} h` over `[tau^2, tau]`.
    pub hi_margin: f64,
    /// min of `sigma + d_t hbar - A^{1/2} hbar` over `[0, tau^2]`.
    pub hbari_margin: f64,
    /// `A^{-2} tau / 2`.
    pub bound: f64,
    pub hi_pass: bool,
    pub hbari_pass: bool,
    pub samples_hi: usize,
    pub samples_hbari: usize,
}

/// Evaluate both weighted inequalities on every sampled `(x, t)`.
pub fn verify_weighted_rt(field: &Sigma10Field, p: &WeightParams) -> Result<WeightedRtReport> {
    let tau = p.tau;
    let eps = 1e-12 * tau.max(1.0);
    let t0 = field.times.first().cloned().unwrap_or(f64::NAN);
    let t1 = field.times.last().cloned().unwrap_or(f64::NAN);
    if !(t0 <= eps && t1 >= tau - eps) {
        return Err(TurnwaveError::MissingCoverage(format!("samples cover [{t0}, {t1}], need [0, {tau}]")));
    }
    let inside = field.times.iter().filter(|&&t| t >= -eps && t <= tau + eps).count();
    if inside < 8 {
        return Err(TurnwaveError::MissingCoverage(format!("{inside} snapshots in [0, tau], need at least 8")));
    }
    let sq = p.a.sqrt();
    let mut r = WeightedRtReport {
        hi_margin: f64::INFINITY,
        hbari_margin: f64::INFINITY,
        bound: 0.5 * tau / (p.a * p.a),
        hi_pass: false,
        hbari_pass: false,
        samples_hi: 0,
        samples_hbari: 0,
    };
    for (ti, &t) in field.times.iter().enumerate() {
        let t = t.clamp(0.0, tau);
        for (xi, &x) in field.x.iter().enumerate() {
            let s = field.values[ti][xi];
            if t >= tau * tau {
                let w = weight_h(x, t, p)?;
                r.hi_margin = r.hi_margin.min(s + w.dt - sq * w.value);
                r.samples_hi += 1;
            }
            if t <= tau * tau {
                let w = weight_hbar(x, t, p)?;
                r.hbari_margin = r.hbari_margin.min(s + w.dt - sq * w.value);
                r.samples_hbari += 1;
            }
        }
    }
    r.hi_pass = r.hi_margin > 0.0;
    r.hbari_pass = r.hbari_margin >= r.bound;
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Reported,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub status: CheckStatus,
    pub value: f64,
}

impl CheckItem {
    fn assert(ok: bool, value: f64) -> Self {
        Self { status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, value }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sigma10Checklist {
    /// sup of `|sigma_1^0|` on the lines `+- i r_b` (reported).
    pub p1: CheckItem,
    /// Schwarz-reflection defect of the continued function.
    pub p2: CheckItem,
    /// max of `|d_x^j sigma_1^0|`, `j <= 4`, over the trajectory (reported).
    pub p3: CheckItem,
    pub p4: CheckItem,
    pub p5: CheckItem,
    pub p6: CheckItem,
    pub p7: CheckItem,
}

/// Tolerances of the exact and symmetry-forced properties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChecklistTolerances {
    pub strip_half_width: f64,
    pub reality: f64,
    pub value: f64,
    pub symmetry: f64,
}

impl Default for ChecklistTolerances {
    fn default() -> Self {
        Self { strip_half_width: 0.02, reality: 1e-10, value: 1e-6, symmetry: 1e-6 }
    }
}

/// Properties 1–7 of `sigma_1^0` on a periodic trajectory starting at the turning point.
///
/// `x = 0` is node 0; `d_t` uses a second-order forward difference on the first three snapshots.
/// Space derivatives use local 9-point stencils: `sigma_1^0` can have complex poles close to
/// the axis where `|dz|` is small, and global spectral derivatives alias there.
pub fn sigma10_checklist(curves: &[(f64, Curve)], tol: &ChecklistTolerances) -> Result<Sigma10Checklist> {
    if curves.len() < 3 {
        return Err(TurnwaveError::MissingCoverage("checklist needs at least three snapshots".into()));
    }
    if curves.iter().any(|(_, c)| !c.is_periodic()) {
        return Err(TurnwaveError::InvalidArgument("checklist works on periodic trajectories".into()));
    }
    let field = Sigma10Field::from_curves(curves)?;
    let origin = curves[0].1.grid().origin_index();

    let mut sup_strip: f64 = 0.0;
    let mut reality: f64 = 0.0;
    let mut ck: f64 = 0.0;
    for (i, (_, c)) in curves.iter().enumerate() {
        let s = StripCurve::from_samples(&c.p(), &c.z2, StripWidth::Const(tol.strip_half_width), 0.0);
        let up = s.trace(Side::Upper, 1);
        let lo = s.trace(Side::Lower, 1);
        for j in 0..c.len() {
            let f = |a: Complex64, b: Complex64| -2.0 * PI * a / (a * a + b * b);
            let (su, sl) = (f(up.z1[j], up.z2[j]), f(lo.z1[j], lo.z2[j]));
            sup_strip = sup_strip.max(su.norm()).max(sl.norm());
            reality = reality.max((su - sl.conj()).norm());
        }
        for order in 0..=4 {
            let d = periodic_fd(&field.values[i], order as usize);
            ck = ck.max(d.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
        }
    }

    let s0 = &field.values[0];
    let dx1 = periodic_fd(s0, 1)[origin];
    let dx2 = periodic_fd(s0, 2)[origin];
    let ts: Vec<f64> = field.times[..3].to_vec();
    let w = fornberg_weights(ts[0], &ts, 1);
    let dt: f64 = (0..3).map(|i| w[i] * field.values[i][origin]).sum();

    Ok(Sigma10Checklist {
        p1: CheckItem { status: CheckStatus::Reported, value: sup_strip },
        p2: CheckItem::assert(reality < tol.reality * sup_strip.max(1.0), reality),
        p3: CheckItem { status: CheckStatus::Reported, value: ck },
        p4: CheckItem::assert(s0[origin].abs() < tol.value, s0[origin]),
        p5: CheckItem::assert(dx1.abs() < tol.symmetry, dx1),
        p6: CheckItem::assert(dx2 < 0.0, dx2),
        p7: CheckItem::assert(dt > 0.0, dt),
    })
}

/// Centered 9-point derivative on a uniform periodic grid over `[0, 2 pi)`.
fn periodic_fd(f: &[f64], order: usize) -> Vec<f64> {
    if order == 0 {
        return f.to_vec();
    }
    let n = f.len();
    let h = 2.0 * PI / n as f64;
    let x: Vec<f64> = (-4..=4).map(|j| j as f64 * h).collect();
    let w = fornberg_weights(0.0, &x, order);
    (0..n).map(|i| (0..9).map(|j| w[j] * f[(i + n + j - 4) % n]).sum()).collect()
}

/// `int_{Gamma_+} |d^k z - d^k zref|^2 dRe zeta`.
pub fn energy_distance(strip: &StripCurve, reference: &StripCurve, k: u32) -> Result<f64> {
    if strip.len() != reference.len() || strip.width != reference.width {
        return Err(TurnwaveError::MismatchedStrips);
    }
    let d = strip.sub(reference)?;
    let n = d.len();
    match d.width {
        StripWidth::Const(r) => {
            let s: f64 = (0..n)
                .map(|i| {
                    let q = wavenumber(i, n);
                    (d.p_hat[i].norm_sqr() + d.z2_hat[i].norm_sqr()) * q.abs().powi(2 * k as i32) * (-2.0 * q * r).exp()
                })
                .sum();
            Ok(2.0 * PI * s)
        }
        StripWidth::Profile(_) => {
            let tr = d.trace(Side::Upper, k);
            let h = 2.0 * PI / n as f64;
            // for k = 0 the z1 trace carries zeta - zeta = 0 after subtraction only through p
            let s: f64 = (0..n)
                .map(|j| {
                    let a = match k {
                        0 => tr.z1[j] - tr.zeta[j],
                        1 => tr.z1[j] - 1.0,
                        _ => tr.z1[j],
                    };
                    a.norm_sqr() + tr.z2[j].norm_sqr()
                })
                .sum();
            Ok(h * s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyFit {
    /// Smallest `C` with `(1/2) dD/dt >= -C lambda^2` on the fitting half.
    pub c_fit: f64,
    /// The same bound holds on the held-out second half.
    pub holds: bool,
    pub lambda_sq: f64,
}

/// Fit the lower-bound constant on the first half of a distance series and check the second.
pub fn fit_energy_bound(times: &[f64], dist: &[f64]) -> Result<EnergyFit> {
    if times.len() != dist.len() || times.len() < 5 {
        return Err(TurnwaveError::InvalidArgument("need at least five distance samples".into()));
    }
    let lambda_sq = dist.iter().cloned().fold(0.0, f64::max);
    if lambda_sq == 0.0 {
        return Ok(EnergyFit { c_fit: 0.0, holds: true, lambda_sq });
    }
    let rates: Vec<f64> = times.windows(2).zip(dist.windows(2)).map(|(t, d)| 0.5 * (d[1] - d[0]) / (t[1] - t[0])).collect();
    let half = rates.len() / 2;
    let need = |r: &[f64]| r.iter().map(|v| (-v / lambda_sq).max(0.0)).fold(0.0, f64::max);
    let c_fit = need(&rates[..half]);
    let holds = need(&rates[half..]) <= c_fit * (1.0 + 1e-12);
    Ok(EnergyFit { c_fit, holds, lambda_sq })
}

/// Quadratic energy of the linearized water-wave system: `||H(omega)/2||^2 + g <f, |D| f>`.
///
/// `f = z2`; the pair `f_t = H(omega)/2`, `omega_t = -2 g f'` conserves it exactly.
pub fn linear_waterwave_energy(curve: &Curve, omega: &[f64], g: f64) -> Result<f64> {
    if !curve.is_periodic() || omega.len() != curve.len() {
        return Err(TurnwaveError::InvalidArgument("energy needs a periodic curve with matching omega".into()));
    }
    let n = curve.len();
    let cw = spectral::fft_real(omega);
    let cf = spectral::fft_real(&curve.z2);
    let s: f64 = (0..n)
        .filter(|&i| !spectral::is_nyquist(i, n))
        .map(|i| {
            let k = wavenumber(i, n).abs();
            if k == 0.0 {
                return 0.0;
            }
            0.25 * cw[i].norm_sqr() + g * k * cf[i].norm_sqr()
        })
        .sum();
    Ok(2.0 * PI * s / (n * n) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripRtNorm {
    pub h4: f64,
    pub f_sup: f64,
    /// inf of `Re f`, `f = dz1 / (dz1^2 + dz2^2)`, over both lines and the axis.
    pub inf: f64,
    pub im_f_h2: f64,
    /// `||z||_{H^4}^2 + ||F||_inf + 1/(inf - c - K ||Im f||_{H^2})`, or `+inf` on regime exit.
    pub rt: f64,
    pub regime_exit: bool,
}

/// Constants of the strip norm: `K` and `c` (default `c = inf(0)/2`, chosen by the caller).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtNormConstants {
    pub k_const: f64,
    pub c: f64,
}

pub fn strip_rt_norm(strip: &StripCurve, consts: &RtNormConstants) -> Result<StripRtNorm> {
    let h4 = strip.banach_norm(4).value;
    let f_sup = strip_arc_chord_sup(strip);
    let n = strip.len();
    let hh = 2.0 * PI / n as f64;
    let mut inf = f64::INFINITY;
    let mut im_sq = 0.0;
    for side in [Side::Upper, Side::Lower, Side::Real] {
        let t = strip.trace(side, 1);
        let mut im = Vec::with_capacity(n);
        for j in 0..n {
            let q = t.z1[j] * t.z1[j] + t.z2[j] * t.z2[j];
            if q.norm() < 1e-14 {
                return Err(TurnwaveError::Degenerate(format!("vanishing tangent square at node {j}")));
            }
            let f = t.z1[j] / q;
            inf = inf.min(f.re);
            im.push(f.im);
        }
        if side != Side::Real {
            let d2 = spectral::derivative(&im, 2);
            im_sq += hh * im.iter().zip(&d2).map(|(a, b)| a * a + b * b).sum::<f64>();
        }
    }
    let im_f_h2 = im_sq.sqrt();
    let den = inf - consts.c - consts.k_const * im_f_h2;
    let (rt, regime_exit) = if den > 0.0 { (h4 * h4 + f_sup + 1.0 / den, false) } else { (f64::INFINITY, true) };
    Ok(StripRtNorm { h4, f_sup, inf, im_f_h2, rt, regime_exit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::extend_to_strip;

    #[test]
    fn cosine_sobolev_norm() {
        let f: Vec<f64> = spectral::uniform_grid(64).iter().map(|a| a.cos()).collect();
        assert!((sobolev_norm(&f, 4).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-13);
        assert_eq!(sobolev_norm(&[0.0; 16], 4).unwrap(), 0.0);
    }

    #[test]
    fn weight_corner_values() {
        let p = WeightParams::default();
        assert_eq!(weight_h(0.0, p.tau, &p).unwrap().value, 0.0);
        assert!((weight_h(0.0, p.tau, &p).unwrap().dt + 2.0 * p.tau / p.a).abs() < 1e-18);
        assert!((weight_hbar(0.0, 0.0, &p).unwrap().value - p.tau * p.tau / (4.0 * p.a)).abs() < 1e-18);
        assert!(matches!(weight_h(0.0, 0.0, &p), Err(TurnwaveError::Domain { .. })));
        let x = 1.3;
        let v = weight_h(x, p.tau, &p).unwrap().value;
        assert!((v - (0.5 * x).sin().powi(2) / p.a).abs() < 1e-16);
    }

    #[test]
    fn h_sign_condition_is_sharp() {
        let p = WeightParams::default();
        assert!(!p.h_nonnegative());
        assert!(weight_h(PI, p.tau * p.tau, &p).unwrap().value < 0.0);
        let q = WeightParams { tau: 0.005, ..p };
        assert!(q.h_nonnegative());
    }

    #[test]
    fn negative_runs_wrap() {
        let s = [-1.0, 1.0, -1.0, -1.0, 1.0, -1.0];
        assert_eq!(negative_runs(&s, true), vec![(5, 2), (2, 2)]);
        assert_eq!(negative_runs(&s, false), vec![(0, 1), (2, 2), (5, 1)]);
    }

    #[test]
    fn flat_rt_quantities() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        let r = sigma_muskat(&c, &PhysicalConstants::default()).unwrap();
        assert!(r.negative_intervals.is_empty() && r.min_sigma == 1.0);
        assert!(sigma10(&c).unwrap().iter().all(|v| (v + 2.0 * PI).abs() < 1e-14));
        let s = extend_to_strip(&c, 0.2).unwrap();
        let n = strip_rt_norm(&s, &RtNormConstants { k_const: 1.0, c: 0.5 }).unwrap();
        assert!((n.rt - 3.0).abs() < 1e-12, "{n:?}");
        assert_eq!(energy_distance(&s, &s, 4).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_energy_distance() {
        let (lam, m, r, k) = (1e-3, 3.0, 0.2, 4);
        let a = Curve::periodic_from_fn(64, |x| (x, 0.1 * x.cos())).unwrap();
        let b = a.with_values(a.z1.clone(), a.z2.iter().zip(a.alpha()).map(|(v, x)| v + lam * (m * x).cos()).collect()).unwrap();
        let (sa, sb) = (extend_to_strip(&a, r).unwrap(), extend_to_strip(&b, r).unwrap());
        let want = PI * lam * lam * m.powi(2 * k as i32) * (2.0 * m * r).cosh();
        let got = energy_distance(&sb, &sa, k).unwrap();
        assert!((got - want).abs() < 1e-10 * want, "{got} {want}");
        assert!((got - energy_distance(&sa, &sb, k).unwrap()).abs() < 1e-15 * want);
    }
}
