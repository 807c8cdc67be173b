//! Periodic curves continued into a complex strip `|Im zeta| <= r`.
//!
//! A strip curve stores the Fourier coefficients of `z1 - alpha` and `z2`;
//! traces on the boundary lines `alpha +- i r` are Fourier multipliers.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Grid};
use crate::error::{Result, TurnwaveError};
use crate::spectral::{self, is_nyquist, wavenumber};

/// Default relative tail tolerance after amplification by `exp(r |k|)`.
pub const TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StripWidth {
    Const(f64),
    /// Variable half-width `h(alpha_j)` sampled on the grid.
    Profile(Vec<f64>),
}

impl StripWidth {
    pub fn at(&self, j: usize) -> f64 {
        match self {
            StripWidth::Const(r) => *r,
            StripWidth::Profile(h) => h[j],
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            StripWidth::Const(r) => *r,
            StripWidth::Profile(h) => h.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// Which boundary line of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
    Real,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
            Side::Real => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripCurve {
    /// Normalized coefficients of `z1 - alpha` in FFT order; the Nyquist slot is zero.
    pub p_hat: Vec<Complex64>,
    pub z2_hat: Vec<Complex64>,
    pub width: StripWidth,
    pub t: f64,
}

/// Complex samples of both components along one line.
#[derive(Debug, Clone)]
pub struct Trace {
    pub zeta: Vec<Complex64>,
    pub z1: Vec<Complex64>,
    pub z2: Vec<Complex64>,
}

fn normalized(f: &[f64]) -> Vec<Complex64> {
    let n = f.len();
    let mut c = spectral::fft_real(f);
    for (i, v) in c.iter_mut().enumerate() {
        *v = if is_nyquist(i, n) { Complex64::new(0.0, 0.0) } else { *v / n as f64 };
    }
    c
}

/// Relative size of the spectral tail at the `3N/8` cutoff after amplification by `exp(r |k|)`.
///
/// Coefficients below the roundoff floor count as zero. When the resolved
/// spectrum ends before the cutoff, the tail is extrapolated from an
/// exponential fit of the coefficient envelope over the upper half of the
/// resolved band; fewer than four resolved modes means an entire function.
pub fn amplified_tail(cs: &[&[Complex64]], r: f64) -> f64 {
    let n = cs[0].len();
    let m = n / 2;
    let mut mag = vec![0.0_f64; m + 1];
    for c in cs {
        for (i, v) in c.iter().enumerate() {
            let k = wavenumber(i, n).abs() as usize;
            mag[k] = mag[k].max(v.norm());
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let floor = 64.0 * f64::EPSILON * max;
    let amp_max = (0..=m).filter(|&k| mag[k] > floor).map(|k| mag[k] * (k as f64 * r).exp()).fold(0.0, f64::max);
    let cut = (3 * n).div_ceil(8);
    let resolved = (1..=m).filter(|&k| mag[k] > floor).max().unwrap_or(0);
    if resolved >= cut {
        let tail = (cut..=m).filter(|&k| mag[k] > floor).map(|k| mag[k] * (k as f64 * r).exp()).fold(0.0, f64::max);
        return tail / amp_max;
    }
    let mut env = vec![0.0_f64; resolved + 1];
    let mut run = 0.0_f64;
    for k in (1..=resolved).rev() {
        run = run.max(mag[k]);
        env[k] = run;
    }
    let lo = (resolved / 2).max(1);
    let pts: Vec<(f64, f64)> = (lo..=resolved).filter(|&k| env[k] > floor).map(|k| (k as f64, env[k].ln())).collect();
    if pts.len() < 4 {
        return 0.0;
    }
    let np = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / np;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let c = cut as f64;
    (icpt + slope * c + r * c).exp() / amp_max
}

/// Continue a periodic curve to the strip of half-width `r`, checking the amplified tail.
pub fn extend_to_strip(curve: &Curve, r: f64) -> Result<StripCurve> {
    extend_to_strip_with_tol(curve, r, TAIL_TOL)
}

pub fn extend_to_strip_with_tol(curve: &Curve, r: f64, tol: f64) -> Result<StripCurve> {
    if !curve.is_periodic() {
        return Err(TurnwaveError::InvalidArgument("strip continuation needs a periodic curve".into()));
    }
    if !(r >= 0.0) {
        return Err(TurnwaveError::InvalidArgument(format!("strip half-width must be nonnegative, got {r}")));
    }
    let mut s = StripCurve { p_hat: normalized(&curve.p()), z2_hat: normalized(&curve.z2), width: StripWidth::Const(r), t: 0.0 };
    s.check_tail(r, tol)?;
    // the tail check treats roundoff-level coefficients as zero; so does the extension,
    // otherwise exp(|k| r) amplifies them on the strip lines
    let max = s.p_hat.iter().chain(&s.z2_hat).map(|c| c.norm()).fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * max;
    for c in s.p_hat.iter_mut().chain(s.z2_hat.iter_mut()) {
        if c.norm() <= floor {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    Ok(s)
}

impl StripCurve {
    /// Build from real periodic samples without any analyticity check.
    pub fn from_samples(p: &[f64], z2: &[f64], width: StripWidth, t: f64) -> Self {
        Self { p_hat: normalized(p), z2_hat: normalized(z2), width, t }
    }

    pub fn len(&self) -> usize {
        self.p_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_hat.is_empty()
    }

    pub fn with_width(mut self, width: StripWidth) -> Self {
        self.width = width;
        self
    }

    /// Half-width when the strip is constant.
    pub fn r(&self) -> Option<f64> {
        match self.width {
            StripWidth::Const(r) => Some(r),
            StripWidth::Profile(_) => None,
        }
    }

    pub fn check_tail(&self, r: f64, tol: f64) -> Result<()> {
        let tail = amplified_tail(&[&self.p_hat, &self.z2_hat], r);
        if tail > tol {
            return Err(TurnwaveError::InsufficientAnalyticity { r, tail });
        }
        Ok(())
    }

    /// Largest conjugate-symmetry defect of the coefficients.
    pub fn reality_defect(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for c in [&self.p_hat, &self.z2_hat] {
            for i in 1..n {
                d = d.max((c[i] - c[n - i].conj()).norm());
            }
            d = d.max(c[0].im.abs());
        }
        d
    }

    /// Real curve on the axis.
    pub fn real_curve(&self) -> Result<Curve> {
        let n = self.len();
        let p = spectral::ifft_real(&self.p_hat.iter().map(|v| v * n as f64).collect::<Vec<_>>());
        let z2 = spectral::ifft_real(&self.z2_hat.iter().map(|v| v * n as f64).collect::<Vec<_>>());
        let alpha = spectral::uniform_grid(n);
        Curve::new(Grid::periodic(n), p.iter().zip(&alpha).map(|(a, b)| a + b).collect(), z2)
    }

    fn line_samples(c: &[Complex64], y: f64, order: u32) -> Vec<Complex64> {
        let n = c.len();
        let unit = Complex64::new(0.0, 1.0);
        let m: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let k = wavenumber(i, n);
                v * (unit * k).powu(order) * (-k * y).exp() * n as f64
            })
            .collect();
        spectral::ifft_complex(&m)
    }

    fn point_sample(c: &[Complex64], zeta: Complex64, order: u32) -> Complex64 {
        let n = c.len();
        let unit = Complex64::new(0.0, 1.0);
        c.iter()
            .enumerate()
            .map(|(i, v)| {
                let k = wavenumber(i, n);
                v * (unit * k).powu(order) * (unit * k * zeta).exp()
            })
            .sum()
    }

    /// Samples of `d^order (z1, z2)` on a boundary line (or the real axis).
    pub fn trace(&self, side: Side, order: u32) -> Trace {
        let n = self.len();
        let alpha = spectral::uniform_grid(n);
        let s = side.sign();
        let zeta: Vec<Complex64> = (0..n).map(|j| Complex64::new(alpha[j], s * self.width.at(j))).collect();
        let (mut z1, z2) = match &self.width {
            StripWidth::Const(r) => {
                (Self::line_samples(&self.p_hat, s * r, order), Self::line_samples(&self.z2_hat, s * r, order))
            }
            StripWidth::Profile(_) => (
                zeta.iter().map(|&w| Self::point_sample(&self.p_hat, w, order)).collect(),
                zeta.iter().map(|&w| Self::point_sample(&self.z2_hat, w, order)).collect(),
            ),
        };
        match order {
            0 => z1.iter_mut().zip(&zeta).for_each(|(v, w)| *v += w),
            1 => z1.iter_mut().for_each(|v| *v += 1.0),
            _ => {}
        }
        Trace { zeta, z1, z2 }
    }

    /// `||f||_r^2` of one component from its coefficients on a constant strip.
    pub fn banach_sq_coeffs(c: &[Complex64], r: f64, k: u32) -> f64 {
        let n = c.len();
        2.0 * PI
            * c.iter()
                .enumerate()
                .map(|(i, v)| {
                    let q = wavenumber(i, n);
                    v.norm_sqr() * (1.0 + q.abs().powi(2 * k as i32)) * 2.0 * (2.0 * q * r).cosh()
                })
                .sum::<f64>()
    }

    /// Banach-scale norm of `(z1 - alpha, z2)` with `k` derivatives, summed over both lines.
    pub fn banach_norm(&self, k: u32) -> BanachScaleNorm {
        let value = match self.width {
            StripWidth::Const(r) => {
                (Self::banach_sq_coeffs(&self.p_hat, r, k) + Self::banach_sq_coeffs(&self.z2_hat, r, k)).sqrt()
            }
            StripWidth::Profile(_) => self.banach_norm_quadrature(k),
        };
        BanachScaleNorm { r: self.width.max(), value }
    }

    /// Same norm by trapezoid quadrature of the traces on both lines.
    pub fn banach_norm_quadrature(&self, k: u32) -> f64 {
        let n = self.len();
        let h = 2.0 * PI / n as f64;
        let mut acc = 0.0;
        for side in [Side::Upper, Side::Lower] {
            let t0 = self.trace(side, 0);
            let tk = self.trace(side, k);
            for j in 0..n {
                let p = t0.z1[j] - t0.zeta[j];
                let dp = if k == 1 { tk.z1[j] - 1.0 } else { tk.z1[j] };
                acc += h * (p.norm_sqr() + t0.z2[j].norm_sqr() + dp.norm_sqr() + tk.z2[j].norm_sqr());
            }
        }
        acc.sqrt()
    }

    pub fn sub(&self, other: &StripCurve) -> Result<StripCurve> {
        if self.len() != other.len() {
            return Err(TurnwaveError::MismatchedStrips);
        }
        Ok(StripCurve {
            p_hat: self.p_hat.iter().zip(&other.p_hat).map(|(a, b)| a - b).collect(),
            z2_hat: self.z2_hat.iter().zip(&other.z2_hat).map(|(a, b)| a - b).collect(),
            width: self.width.clone(),
            t: self.t,
        })
    }

    /// CSV: header comment with `r`, `t`, `M`, then one row per mode `-M..=M`.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let m = n / 2 - 1;
        let mut s = String::new();
        let r = match &self.width {
            StripWidth::Const(r) => format!("{r:.17e}"),
            StripWidth::Profile(_) => "profile".to_string(),
        };
        let _ = writeln!(s, "# r={r} t={:.17e} M={m}", self.t);
        s.push_str("k,p_re,p_im,z2_re,z2_im\n");
        for k in -(m as i64)..=(m as i64) {
            let i = k.rem_euclid(n as i64) as usize;
            let (p, z) = (self.p_hat[i], self.z2_hat[i]);
            let _ = writeln!(s, "{k},{:.17e},{:.17e},{:.17e},{:.17e}", p.re, p.im, z.re, z.im);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BanachScaleNorm {
    pub r: f64,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_trace_is_closed_form() {
        let (eps, r) = (0.3, 0.4);
        let c = Curve::periodic_from_fn(32, |a| (a, eps * a.cos())).unwrap();
        let s = extend_to_strip(&c, r).unwrap();
        let tr = s.trace(Side::Upper, 0);
        for j in 0..32 {
            let a = c.alpha()[j];
            let want = Complex64::new(eps * a.cos() * r.cosh(), -eps * a.sin() * r.sinh());
            assert!((tr.z2[j] - want).norm() < 1e-14);
            assert!((tr.z1[j] - Complex64::new(a, r)).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_width_trace_is_real_samples() {
        let c = Curve::periodic_from_fn(32, |a| (a + 0.1 * a.sin(), 0.2 * (2.0 * a).cos())).unwrap();
        let s = extend_to_strip(&c, 0.0).unwrap();
        let tr = s.trace(Side::Upper, 0);
        for j in 0..32 {
            assert!((tr.z1[j].re - c.z1[j]).abs() < 1e-14 && tr.z1[j].im.abs() < 1e-14);
            assert!((tr.z2[j].re - c.z2[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn analyticity_radius_is_detected() {
        // coefficients exp(-rho0 |k|) give a curve analytic in |Im| < rho0
        let n = 256;
        let rho0 = 1.0;
        let mut z2_hat = vec![Complex64::new(0.0, 0.0); n];
        for k in 1..n / 2 {
            let v = Complex64::new((-rho0 * k as f64).exp(), 0.0);
            z2_hat[k] = v;
            z2_hat[n - k] = v.conj();
        }
        let s = StripCurve { p_hat: vec![Complex64::new(0.0, 0.0); n], z2_hat, width: StripWidth::Const(0.0), t: 0.0 };
        assert!(s.check_tail(rho0 / 2.0, TAIL_TOL).is_ok());
        assert!(matches!(s.check_tail(2.0 * rho0, TAIL_TOL), Err(TurnwaveError::InsufficientAnalyticity { .. })));
    }

    #[test]
    fn norm_coefficients_match_quadrature() {
        let c = Curve::periodic_from_fn(64, |a| (a + 0.1 * a.sin(), 0.2 * (2.0 * a).cos() + 0.05 * (3.0 * a).sin()))
            .unwrap();
        let s = extend_to_strip(&c, 0.3).unwrap();
        let a = s.banach_norm(4).value;
        let b = s.banach_norm_quadrature(4);
        assert!((a - b).abs() < 1e-10 * a, "{a} {b}");
    }
}
