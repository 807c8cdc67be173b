//! Complexified Muskat operator and local solvability by successive approximations.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::error::{Result, TurnwaveError};
use crate::quadrature::cumulative_simpson;
use crate::singular::muskat_rhs_periodic;
use crate::spectral::{self, is_nyquist, wavenumber};
use crate::strip::{Side, StripCurve, StripWidth, Trace};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);

fn wrap(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcChordMargin {
    /// Minimum of `|cosh dz2 - cos dz1| / (|Re d| + |Im d|)^2` over sampled pairs.
    pub margin: f64,
    pub floor: f64,
    pub pass: bool,
}

fn traces3(strip: &StripCurve, order: u32) -> Vec<Trace> {
    [Side::Upper, Side::Lower, Side::Real].iter().map(|&s| strip.trace(s, order)).collect()
}

/// Complex arc-chord margin over node pairs on both boundary lines and the real axis.
///
/// Coincident pairs use the diagonal limit `|z1'^2 + z2'^2| / 2`.
pub fn complex_arc_chord(strip: &StripCurve, floor: f64) -> ArcChordMargin {
    let n = strip.len();
    let t0 = traces3(strip, 0);
    let t1 = traces3(strip, 1);
    let mut margin = f64::INFINITY;
    for a in 0..3 {
        for b in a..3 {
            let (ta, tb) = (&t0[a], &t0[b]);
            let m = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut best = f64::INFINITY;
                    for j in 0..n {
                        let d = ta.zeta[i] - tb.zeta[j];
                        let rhs = (wrap(d.re).abs() + d.im.abs()).powi(2);
                        let v = if rhs == 0.0 {
                            (t1[a].z1[i] * t1[a].z1[i] + t1[a].z2[i] * t1[a].z2[i]).norm() / 2.0
                        } else {
                            let lhs = ((ta.z2[i] - tb.z2[j]).cosh() - (ta.z1[i] - tb.z1[j]).cos()).norm();
                            lhs / rhs
                        };
                        best = best.min(v);
                    }
                    best
                })
                .reduce(|| f64::INFINITY, f64::min);
            margin = margin.min(m);
        }
    }
    ArcChordMargin { margin, floor, pass: margin >= floor }
}

/// `sup |zeta - w|^2 / |z(zeta) - z(w)|^2` over the same pairs, with the periodic wrap.
pub fn strip_arc_chord_sup(strip: &StripCurve) -> f64 {
    let n = strip.len();
    let t0 = traces3(strip, 0);
    let t1 = traces3(strip, 1);
    let mut sup: f64 = 0.0;
    for a in 0..3 {
        for b in a..3 {
            let (ta, tb) = (&t0[a], &t0[b]);
            let m = (0..n)
                .into_par_iter()
                .map(|i| {
                    let mut best: f64 = 0.0;
                    for j in 0..n {
                        let d = ta.zeta[i] - tb.zeta[j];
                        let shift = wrap(d.re) - d.re;
                        let num = shift + d;
                        let v = if num.norm_sqr() == 0.0 {
                            1.0 / (t1[a].z1[i].norm_sqr() + t1[a].z2[i].norm_sqr())
                        } else {
                            let dz1 = ta.z1[i] - tb.z1[j] + shift;
                            let dz2 = ta.z2[i] - tb.z2[j];
                            num.norm_sqr() / (dz1.norm_sqr() + dz2.norm_sqr())
                        };
                        best = best.max(v);
                    }
                    best
                })
                .reduce(|| 0.0, f64::max);
            sup = sup.max(m);
        }
    }
    sup
}

/// Complex velocity samples on one line.
#[derive(Debug, Clone)]
pub struct ComplexVelocity {
    pub v1: Vec<C>,
    pub v2: Vec<C>,
}

#[derive(Debug, Clone)]
pub struct StripVelocity {
    pub upper: ComplexVelocity,
    pub lower: ComplexVelocity,
}

fn line_at(strip: &StripCurve, y: f64) -> [Vec<C>; 6] {
    let one = StripCurve { width: StripWidth::Const(y.abs()), ..strip.clone() };
    let side = if y >= 0.0 { Side::Upper } else { Side::Lower };
    let a = one.trace(side, 0);
    let b = one.trace(side, 1);
    let c = one.trace(side, 2);
    [a.z1, a.z2, b.z1, b.z2, c.z1, c.z2]
}

fn g_on_line(line: &[Vec<C>; 6], j: usize, prefactor: f64) -> Result<(C, C)> {
    let [z1, z2, d1, d2, dd1, dd2] = line;
    let n = z1.len();
    let h = 2.0 * PI / n as f64;
    let mut s1 = ZERO;
    let mut s2 = ZERO;
    for k in 0..n {
        if k == j {
            let g = 2.0 * d1[j] / (d1[j] * d1[j] + d2[j] * d2[j]);
            s1 += g * dd1[j];
            s2 += g * dd2[j];
            continue;
        }
        let den = (z2[j] - z2[k]).cosh() - (z1[j] - z1[k]).cos();
        if den.norm() < 1e-300 {
            return Err(TurnwaveError::SingularKernel { margin: 0.0 });
        }
        let kern = (z1[j] - z1[k]).sin() / den;
        s1 += kern * (d1[j] - d1[k]);
        s2 += kern * (d2[j] - d2[k]);
    }
    let (v1, v2) = (prefactor * h * s1, prefactor * h * s2);
    if !(v1.re.is_finite() && v1.im.is_finite() && v2.re.is_finite() && v2.im.is_finite()) {
        return Err(TurnwaveError::SingularKernel { margin: 0.0 });
    }
    Ok((v1, v2))
}

/// Complexified periodic Muskat operator on both boundary lines.
///
/// Each target is integrated along the horizontal line through it, with the
/// same diagonal limit as the real kernel.
pub fn complex_g(strip: &StripCurve, prefactor: f64) -> Result<StripVelocity> {
    let n = strip.len();
    let eval = |sign: f64| -> Result<ComplexVelocity> {
        let rows: Vec<Result<(C, C)>> = match &strip.width {
            StripWidth::Const(r) => {
                let line = line_at(strip, sign * r);
                (0..n).into_par_iter().map(|j| g_on_line(&line, j, prefactor)).collect()
            }
            StripWidth::Profile(h) => {
                (0..n).into_par_iter().map(|j| g_on_line(&line_at(strip, sign * h[j]), j, prefactor)).collect()
            }
        };
        let mut v = ComplexVelocity { v1: Vec::with_capacity(n), v2: Vec::with_capacity(n) };
        for r in rows {
            let (a, b) = r?;
            v.v1.push(a);
            v.v2.push(b);
        }
        Ok(v)
    };
    Ok(StripVelocity { upper: eval(1.0)?, lower: eval(-1.0)? })
}

/// Normalized, filtered coefficients of `G(z)` from the real-axis evaluation.
///
/// For analytic data the strip trace of `G(z)` is the continuation of this real trace.
pub fn g_coefficients(strip: &StripCurve, prefactor: f64, filter: f64) -> Result<(Vec<C>, Vec<C>)> {
    let curve = strip.real_curve()?;
    g_coefficients_curve(&curve, prefactor, filter)
}

fn g_coefficients_curve(curve: &Curve, prefactor: f64, filter: f64) -> Result<(Vec<C>, Vec<C>)> {
    let v = muskat_rhs_periodic(curve, prefactor)?;
    let n = curve.len();
    let coef = |f: &[f64]| {
        let mut c = spectral::fft_real(f);
        spectral::krasny_filter_in_place(&mut c, filter);
        for (i, x) in c.iter_mut().enumerate() {
            *x = if is_nyquist(i, n) { ZERO } else { *x / n as f64 };
        }
        c
    };
    Ok((coef(&v.v1), coef(&v.v2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ShrinkSchedule {
    /// `r(t) = r0 (1 - t / (2T))`.
    Linear,
    /// `r(t) = r0 exp(-gamma int_0^t ||z||^power ds)`.
    Exponential { gamma: f64, power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CkOptions {
    pub r0: f64,
    pub t_final: f64,
    pub schedule: ShrinkSchedule,
    pub panels: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub prefactor: f64,
    pub filter_threshold: f64,
    /// Derivative order of the Banach-scale norm.
    pub k: u32,
    /// Radius of the admissible set: `||z|| < R` and `F < R^2`.
    pub bound_r: f64,
    /// Successive differences below this that stop contracting are accepted as the roundoff floor.
    pub noise_floor: f64,
}

impl Default for CkOptions {
    fn default() -> Self {
        Self {
            r0: 0.1,
            t_final: 0.05,
            schedule: ShrinkSchedule::Linear,
            panels: 64,
            tol: 1e-10,
            max_iter: 50,
            prefactor: 1.0 / (4.0 * PI),
            filter_threshold: 1e-12,
            k: 4,
            bound_r: 1e4,
            noise_floor: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CkTrajectory {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    pub curves: Vec<StripCurve>,
    /// Relative successive-difference norm per iteration.
    pub history: Vec<f64>,
    /// Converged on the roundoff plateau rather than below `tol`.
    pub noise_floor: bool,
}

impl CkTrajectory {
    pub fn iterations(&self) -> usize {
        self.history.len()
    }

    /// Successive contraction ratios `d_{n+1} / d_n`.
    pub fn ratios(&self) -> Vec<f64> {
        self.history.windows(2).map(|w| w[1] / w[0]).collect()
    }

    pub fn last(&self) -> &StripCurve {
        self.curves.last().expect("nonempty trajectory")
    }
}

fn pair_norm(p: &[C], z: &[C], r: f64, k: u32) -> f64 {
    (StripCurve::banach_sq_coeffs(p, r, k) + StripCurve::banach_sq_coeffs(z, r, k)).sqrt()
}

fn radii(opts: &CkOptions, times: &[f64], norms: &[f64]) -> Vec<f64> {
    match opts.schedule {
        ShrinkSchedule::Linear => times.iter().map(|t| opts.r0 * (1.0 - t / (2.0 * opts.t_final))).collect(),
        ShrinkSchedule::Exponential { gamma, power } => {
            let f: Vec<f64> = norms.iter().map(|v| v.powf(power)).collect();
            let h = opts.t_final / opts.panels as f64;
            cumulative_simpson(&f, h, 0.0).iter().map(|i| opts.r0 * (-gamma * i).exp()).collect()
        }
    }
}

/// Successive approximations `z^{n+1}(t) = z0 + int_0^t G(z^n(s)) ds` on a shrinking strip.
pub fn ck_solve(z0: &StripCurve, opts: &CkOptions) -> Result<CkTrajectory> {
    if opts.panels == 0 || opts.panels % 2 == 1 {
        return Err(TurnwaveError::InvalidArgument("panel count must be positive and even".into()));
    }
    if !(opts.t_final > 0.0) || !(opts.r0 > 0.0) {
        return Err(TurnwaveError::InvalidArgument("CK horizon and initial half-width must be positive".into()));
    }
    let np = opts.panels + 1;
    let n = z0.len();
    let h = opts.t_final / opts.panels as f64;
    let times: Vec<f64> = (0..np).map(|j| j as f64 * h).collect();
    let mut zp: Vec<Vec<C>> = vec![z0.p_hat.clone(); np];
    let mut zz: Vec<Vec<C>> = vec![z0.z2_hat.clone(); np];
    let mut norms: Vec<f64> = vec![pair_norm(&z0.p_hat, &z0.z2_hat, opts.r0, opts.k); np];
    let mut rs = radii(opts, &times, &norms);
    let mut history = Vec::new();
    let mut noise_floor = false;
    let mut converged = false;

    for _ in 0..opts.max_iter {
        debug_assert!(rs.iter().all(|r| *r > 0.0 && *r <= opts.r0));
        // G is evaluated on the real axis, which lies inside every strip of the schedule
        let gs: Vec<Result<(Vec<C>, Vec<C>)>> = (0..np)
            .into_par_iter()
            .map(|j| {
                let s = StripCurve { p_hat: zp[j].clone(), z2_hat: zz[j].clone(), width: StripWidth::Const(0.0), t: 0.0 };
                g_coefficients(&s, opts.prefactor, opts.filter_threshold)
            })
            .collect();
        let gs = gs.into_iter().collect::<Result<Vec<_>>>().map_err(|e| match e {
            TurnwaveError::SelfIntersection { .. } | TurnwaveError::BlowUp { .. } => {
                TurnwaveError::RegimeExit { t: z0.t, reason: format!("operator evaluation failed: {e}") }
            }
            other => other,
        })?;
        let mut np_p = vec![vec![ZERO; n]; np];
        let mut np_z = vec![vec![ZERO; n]; np];
        for i in 0..n {
            let f1: Vec<C> = gs.iter().map(|g| g.0[i]).collect();
            let f2: Vec<C> = gs.iter().map(|g| g.1[i]).collect();
            let i1 = cumulative_simpson(&f1, h, ZERO);
            let i2 = cumulative_simpson(&f2, h, ZERO);
            for j in 0..np {
                np_p[j][i] = z0.p_hat[i] + i1[j];
                np_z[j][i] = z0.z2_hat[i] + i2[j];
            }
        }
        let mut d: f64 = 0.0;
        let mut new_norms = Vec::with_capacity(np);
        for j in 0..np {
            let dp: Vec<C> = np_p[j].iter().zip(&zp[j]).map(|(a, b)| a - b).collect();
            let dz: Vec<C> = np_z[j].iter().zip(&zz[j]).map(|(a, b)| a - b).collect();
            let diff = pair_norm(&dp, &dz, rs[j], opts.k);
            d = d.max(diff / norms[j].max(1.0));
            let nn = pair_norm(&np_p[j], &np_z[j], rs[j], opts.k);
            if !(nn < opts.bound_r) {
                return Err(TurnwaveError::RegimeExit {
                    t: z0.t + times[j],
                    reason: format!("norm {nn:.3e} exceeds R = {:.3e}", opts.bound_r),
                });
            }
            new_norms.push(nn);
        }
        history.push(d);
        zp = np_p;
        zz = np_z;
        norms = new_norms;
        rs = radii(opts, &times, &norms);
        if d < opts.tol {
            converged = true;
            break;
        }
        let m = history.len();
        if m >= 4 && d < opts.noise_floor && history[m - 3..].iter().zip(&history[m - 4..m - 1]).all(|(a, b)| a / b >= 0.9)
        {
            noise_floor = true;
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(TurnwaveError::NonConvergence { history });
    }
    let curves: Vec<StripCurve> = (0..np)
        .map(|j| StripCurve {
            p_hat: zp[j].clone(),
            z2_hat: zz[j].clone(),
            width: StripWidth::Const(rs[j]),
            t: z0.t + times[j],
        })
        .collect();
    for c in &curves {
        let f = strip_arc_chord_sup(c);
        if !(f < opts.bound_r * opts.bound_r) {
            return Err(TurnwaveError::RegimeExit { t: c.t, reason: format!("arc-chord bound {f:.3e} exceeds R^2") });
        }
    }
    Ok(CkTrajectory { times: times.iter().map(|t| z0.t + t).collect(), radii: rs, curves, history, noise_floor })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GBounds {
    /// max `||G(z)||_{r'} (r - r') / ||z||_r`.
    pub growth: f64,
    /// max `||G(z2) - G(z1)||_{r'} (r - r') / ||z2 - z1||_r`.
    pub lipschitz: f64,
    /// max `|G(z)(zeta) - G(z)(zeta - beta)| / |beta|` for one-cell shifts along the upper line.
    pub shift: f64,
    pub samples: usize,
}

/// Empirical (non-rigorous) constants in the operator bounds over a sample set.
pub fn estimate_g_bounds(
    pairs: &[(StripCurve, StripCurve)],
    r: f64,
    r_prime: f64,
    prefactor: f64,
    filter: f64,
) -> Result<GBounds> {
    if !(r > r_prime && r_prime >= 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("need r > r' >= 0, got {r}, {r_prime}")));
    }
    let k = 4;
    let gap = r - r_prime;
    let mut out = GBounds { growth: 0.0, lipschitz: 0.0, shift: 0.0, samples: 0 };
    for (a, b) in pairs {
        let ga = g_coefficients(a, prefactor, filter)?;
        let gb = g_coefficients(b, prefactor, filter)?;
        for (z, g) in [(a, &ga), (b, &gb)] {
            let nz = pair_norm(&z.p_hat, &z.z2_hat, r, k);
            if nz > 0.0 {
                out.growth = out.growth.max(pair_norm(&g.0, &g.1, r_prime, k) * gap / nz);
            }
            let gs = StripCurve { p_hat: g.0.clone(), z2_hat: g.1.clone(), width: StripWidth::Const(r_prime), t: 0.0 };
            let tr = gs.trace(Side::Upper, 0);
            let n = tr.zeta.len();
            let hh = 2.0 * PI / n as f64;
            for j in 0..n {
                let i = (j + n - 1) % n;
                // the z1 trace carries zeta itself; remove it to compare velocities
                let d1 = (tr.z1[j] - tr.zeta[j]) - (tr.z1[i] - tr.zeta[i]);
                let d2 = tr.z2[j] - tr.z2[i];
                out.shift = out.shift.max((d1.norm_sqr() + d2.norm_sqr()).sqrt() / hh);
            }
        }
        let dp: Vec<C> = b.p_hat.iter().zip(&a.p_hat).map(|(x, y)| x - y).collect();
        let dz: Vec<C> = b.z2_hat.iter().zip(&a.z2_hat).map(|(x, y)| x - y).collect();
        let nd = pair_norm(&dp, &dz, r, k);
        if nd > 0.0 {
            let g1: Vec<C> = gb.0.iter().zip(&ga.0).map(|(x, y)| x - y).collect();
            let g2: Vec<C> = gb.1.iter().zip(&ga.1).map(|(x, y)| x - y).collect();
            out.lipschitz = out.lipschitz.max(pair_norm(&g1, &g2, r_prime, k) * gap / nd);
            out.samples += 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedRt {
    pub rt: Vec<f64>,
    pub min: f64,
    pub pass: bool,
    /// Largest imaginary part of the principal-value integral (zero for real data on the axis).
    pub pv_imag_max: f64,
}

/// Generalized RT function on the upper line of a strip with profile `h`.
///
/// `dx_h` and `dt_h` are the profile derivatives sampled on the grid.
pub fn generalized_rt(strip: &StripCurve, dx_h: &[f64], dt_h: &[f64]) -> Result<GeneralizedRt> {
    let n = strip.len();
    if dx_h.len() != n || dt_h.len() != n {
        return Err(TurnwaveError::InvalidArgument("profile derivatives must match the grid".into()));
    }
    if n % 2 == 1 {
        return Err(TurnwaveError::OddGrid(n));
    }
    let t0 = strip.trace(Side::Upper, 0);
    let t1 = strip.trace(Side::Upper, 1);
    let hh = 2.0 * PI / n as f64;
    let unit = C::new(0.0, 1.0);
    let rows: Vec<Result<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let q = t1.z1[j] * t1.z1[j] + t1.z2[j] * t1.z2[j];
            if q.norm() < 1e-14 {
                return Err(TurnwaveError::Degenerate(format!("vanishing tangent square at node {j}")));
            }
            let mut pv = ZERO;
            for k in (0..n).filter(|k| (j + n - k) % 2 == 1) {
                let den = (t0.z2[j] - t0.z2[k]).cosh() - (t0.z1[j] - t0.z1[k]).cos();
                if den.norm() < 1e-300 {
                    return Err(TurnwaveError::SingularKernel { margin: 0.0 });
                }
                pv += (t0.z1[j] - t0.z1[k]).sin() / den * (1.0 + unit * dx_h[k]);
            }
            pv *= 2.0 * hh;
            let a = 1.0 / (1.0 + unit * dx_h[j]);
            let rt = (-2.0 * PI * t1.z1[j] / q * a).re + ((pv + unit * dt_h[j]) * a).im;
            Ok((rt, pv.im))
        })
        .collect();
    let mut rt = Vec::with_capacity(n);
    let mut pv_imag_max: f64 = 0.0;
    for r in rows {
        let (v, im) = r?;
        rt.push(v);
        pv_imag_max = pv_imag_max.max(im.abs());
    }
    let min = rt.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(GeneralizedRt { rt, min, pass: min > 0.0, pv_imag_max })
}

/// Sampled profile `h(x)` with its `x` derivative, for building variable strips.
pub fn profile_derivative(h: &[f64]) -> Vec<f64> {
    spectral::derivative(h, 1)
}

/// Mode index helper for conjugate-symmetric coefficient vectors.
pub fn mode(i: usize, n: usize) -> i64 {
    wavenumber(i, n) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strip::extend_to_strip;

    fn wavy(n: usize) -> Curve {
        Curve::periodic_from_fn(n, |a| (a + 0.05 * a.sin(), 0.1 * a.cos() + 0.04 * (2.0 * a).sin())).unwrap()
    }

    #[test]
    fn real_axis_g_matches_muskat_rhs() {
        let c = wavy(64);
        let s = extend_to_strip(&c, 0.0).unwrap();
        let g = complex_g(&s, 0.3).unwrap();
        let v = muskat_rhs_periodic(&c, 0.3).unwrap();
        for j in 0..64 {
            assert!((g.upper.v1[j].re - v.v1[j]).abs() < 1e-13);
            assert!((g.upper.v2[j].re - v.v2[j]).abs() < 1e-13);
            assert!(g.upper.v2[j].im.abs() < 1e-13);
        }
    }

    #[test]
    fn schwarz_reflection_of_g() {
        let s = extend_to_strip(&wavy(64), 0.2).unwrap();
        let g = complex_g(&s, 1.0).unwrap();
        for j in 0..64 {
            assert!((g.upper.v1[j] - g.lower.v1[j].conj()).norm() < 1e-12);
            assert!((g.upper.v2[j] - g.lower.v2[j].conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn flat_strip_is_stationary() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        let s = extend_to_strip(&c, 0.1).unwrap();
        let g = complex_g(&s, 1.0).unwrap();
        assert!(g.upper.v1.iter().chain(&g.upper.v2).all(|v| v.norm() < 1e-14));
        let opts = CkOptions { t_final: 0.01, ..Default::default() };
        let traj = ck_solve(&s, &opts).unwrap();
        assert_eq!(traj.iterations(), 1);
        assert!(traj.last().p_hat.iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn flat_generalized_rt_is_minus_two_pi() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        let s = extend_to_strip(&c, 0.1).unwrap();
        let z = vec![0.0; 32];
        let g = generalized_rt(&s, &z, &z).unwrap();
        assert!(g.rt.iter().all(|v| (v + 2.0 * PI).abs() < 1e-12));
        assert!(!g.pass);
    }

    #[test]
    fn arc_chord_is_translation_invariant() {
        let c = wavy(32);
        let s = extend_to_strip(&c, 0.1).unwrap();
        let shifted = c.with_values(c.z1.iter().map(|v| v + 0.7).collect(), c.z2.clone()).unwrap();
        let s2 = extend_to_strip(&shifted, 0.1).unwrap();
        let (a, b) = (complex_arc_chord(&s, 0.05).margin, complex_arc_chord(&s2, 0.05).margin);
        assert!((a - b).abs() < 1e-12, "{a} {b}");
    }
}
