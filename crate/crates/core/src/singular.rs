//! Principal-value sums for the Birkhoff-Rott velocity and the Muskat contour equations.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{Curve, Grid, OpenGrid};
use crate::error::{Result, TurnwaveError};
use crate::quadrature::{pairwise_sum, pairwise_sum2, Pair};
use crate::spectral;

/// Per-node velocity with the quadrature's own error estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Velocity {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub error_estimate: f64,
}

impl Velocity {
    pub fn zeros(n: usize) -> Self {
        Self { v1: vec![0.0; n], v2: vec![0.0; n], error_estimate: 0.0 }
    }

    pub fn max_abs(&self) -> f64 {
        self.v1.iter().chain(&self.v2).fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Amplitude of the highest resolved modes, a proxy for spectral quadrature error.
fn spectral_tail_estimate(v1: &[f64], v2: &[f64]) -> f64 {
    let n = v1.len() as f64;
    let tail = |f: &[f64]| {
        let c = spectral::fft_real(f);
        let m = c.len();
        c.iter()
            .enumerate()
            .filter(|(i, _)| spectral::wavenumber(*i, m).abs() > 3.0 * m as f64 / 8.0)
            .map(|(_, v)| 2.0 * v.norm() / n)
            .fold(0.0, f64::max)
    };
    tail(v1).max(tail(v2))
}

fn require_periodic_even(curve: &Curve) -> Result<usize> {
    if !curve.is_periodic() {
        return Err(TurnwaveError::InvalidArgument("periodic kernel applied to an open curve".into()));
    }
    let n = curve.len();
    if n % 2 != 0 {
        return Err(TurnwaveError::OddGrid(n));
    }
    Ok(n)
}

/// Pairwise quantities shared by the periodic kernels.
///
/// Row-major `n x n` tables of `sin dz1`, `cos dz1`, `sinh dz2`, `cosh dz2`.
pub struct PairTable {
    pub n: usize,
    pub sin_x: Vec<f64>,
    pub cos_x: Vec<f64>,
    pub sinh_y: Vec<f64>,
    pub cosh_y: Vec<f64>,
}

impl PairTable {
    pub fn new(curve: &Curve) -> Result<Self> {
        let n = curve.len();
        let mut sin_x = vec![0.0; n * n];
        let mut cos_x = vec![0.0; n * n];
        let mut sinh_y = vec![0.0; n * n];
        let mut cosh_y = vec![0.0; n * n];
        let (z1, z2) = (&curve.z1, &curve.z2);
        sin_x
            .par_chunks_mut(n)
            .zip(cos_x.par_chunks_mut(n))
            .zip(sinh_y.par_chunks_mut(n))
            .zip(cosh_y.par_chunks_mut(n))
            .enumerate()
            .for_each(|(i, (((sx, cx), sy), cy))| {
                for j in 0..n {
                    let (s, c) = (z1[i] - z1[j]).sin_cos();
                    let e = (z2[i] - z2[j]).exp();
                    sx[j] = s;
                    cx[j] = c;
                    sy[j] = 0.5 * (e - 1.0 / e);
                    cy[j] = 0.5 * (e + 1.0 / e);
                }
            });
        for i in 0..n {
            for j in ((i + 1) % 2..n).step_by(2) {
                if cosh_y[i * n + j] - cos_x[i * n + j] == 0.0 {
                    return Err(TurnwaveError::SelfIntersection { i: i.min(j), j: i.max(j) });
                }
            }
        }
        Ok(Self { n, sin_x, cos_x, sinh_y, cosh_y })
    }

    #[inline]
    pub fn den(&self, k: usize) -> f64 {
        self.cosh_y[k] - self.cos_x[k]
    }
}

/// Birkhoff-Rott matrices: `BR = (K1 omega, K2 omega)` with the alternating-point rule.
pub struct BrMatrix {
    pub n: usize,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
}

impl BrMatrix {
    pub fn new(table: &PairTable) -> Self {
        let n = table.n;
        let w = 2.0 * (2.0 * PI / n as f64) / (4.0 * PI);
        let mut k1 = vec![0.0; n * n];
        let mut k2 = vec![0.0; n * n];
        k1.par_chunks_mut(n).zip(k2.par_chunks_mut(n)).enumerate().for_each(|(i, (r1, r2))| {
            for j in ((i + 1) % 2..n).step_by(2) {
                let k = i * n + j;
                let d = table.den(k);
                r1[j] = -w * table.sinh_y[k] / d;
                r2[j] = w * table.sin_x[k] / d;
            }
        });
        Self { n, k1, k2 }
    }

    /// Apply to an amplitude; each row is summed pairwise over the opposite-parity sources.
    pub fn apply(&self, omega: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        (0..n)
            .into_par_iter()
            .map(|i| {
                let off = (i + 1) % 2;
                let m = n / 2;
                let r1 = &self.k1[i * n..(i + 1) * n];
                let r2 = &self.k2[i * n..(i + 1) * n];
                let a = pairwise_sum(0, m, &|q| r1[off + 2 * q] * omega[off + 2 * q]);
                let b = pairwise_sum(0, m, &|q| r2[off + 2 * q] * omega[off + 2 * q]);
                (a, b)
            })
            .unzip()
    }
}

/// Birkhoff-Rott velocity `(1/2pi) PV int (dz)^perp / |dz|^2 omega` on a periodic curve.
///
/// Uses the periodic kernel `(-sinh dz2, sin dz1) / (cosh dz2 - cos dz1) / 4pi` and
/// the alternating-point trapezoid: targets of one parity see sources of the other.
pub fn birkhoff_rott(curve: &Curve, omega: &[f64]) -> Result<Velocity> {
    let n = require_periodic_even(curve)?;
    if omega.len() != n {
        return Err(TurnwaveError::InvalidArgument("amplitude and curve grids differ".into()));
    }
    if omega.iter().all(|w| *w == 0.0) {
        return Ok(Velocity::zeros(n));
    }
    let table = PairTable::new(curve)?;
    let (v1, v2) = BrMatrix::new(&table).apply(omega);
    let error_estimate = spectral_tail_estimate(&v1, &v2);
    Ok(Velocity { v1, v2, error_estimate })
}

/// Directional derivative of BR with respect to the curve, in direction `dz`, at fixed `omega`.
pub fn birkhoff_rott_curve_derivative(
    table: &PairTable,
    omega: &[f64],
    dz1: &[f64],
    dz2: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = table.n;
    let w = 2.0 * (2.0 * PI / n as f64) / (4.0 * PI);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let off = (i + 1) % 2;
            let term = |q: usize| {
                let j = off + 2 * q;
                let k = i * n + j;
                let d = table.den(k);
                let s = w * omega[j] / (d * d);
                let (sx, cx, sy, cy) = (table.sin_x[k], table.cos_x[k], table.sinh_y[k], table.cosh_y[k]);
                let ex = dz1[i] - dz1[j];
                let ey = dz2[i] - dz2[j];
                Pair(s * (sx * sy * ex + (cy * cx - 1.0) * ey), s * ((cx * cy - 1.0) * ex - sx * sy * ey))
            };
            let r = pairwise_sum2(0, n / 2, &term);
            (r.0, r.1)
        })
        .unzip()
}

/// Periodic Muskat right-hand side
/// `prefactor * int sin(dz1)/(cosh dz2 - cos dz1) (dz(alpha) - dz(beta)) dbeta`.
///
/// The integrand has a removable singularity on the diagonal, replaced by
/// `2 z1' z'' / |z'|^2`, so the plain trapezoid rule is spectrally accurate.
pub fn muskat_rhs_periodic(curve: &Curve, prefactor: f64) -> Result<Velocity> {
    let n = require_periodic_even(curve)?;
    let (d1, d2, dd1, dd2) = curve.kernel_derivatives();
    let h = 2.0 * PI / n as f64;
    let (z1, z2) = (&curve.z1, &curve.z2);
    let (v1, v2): (Vec<f64>, Vec<f64>) = (0..n)
        .into_par_iter()
        .map(|i| {
            let kern = |j: usize| -> Pair {
                if j == i {
                    let g = 2.0 * d1[i] / (d1[i] * d1[i] + d2[i] * d2[i]);
                    return Pair(g * dd1[i], g * dd2[i]);
                }
                let (s, c) = (z1[i] - z1[j]).sin_cos();
                let e = (z2[i] - z2[j]).exp();
                let k = s / (0.5 * (e + 1.0 / e) - c);
                Pair(k * (d1[i] - d1[j]), k * (d2[i] - d2[j]))
            };
            let r = pairwise_sum2(0, n, &kern);
            (prefactor * h * r.0, prefactor * h * r.1)
        })
        .unzip();
    if v1.iter().chain(&v2).any(|v| !v.is_finite()) {
        return Err(non_finite_cause(curve, true));
    }
    let error_estimate = spectral_tail_estimate(&v1, &v2);
    Ok(Velocity { v1, v2, error_estimate })
}

/// Classify a non-finite kernel sum: coincident nodes or genuine overflow.
fn non_finite_cause(curve: &Curve, periodic: bool) -> TurnwaveError {
    let n = curve.len();
    for i in 0..n {
        for j in i + 1..n {
            let x = curve.z1[i] - curve.z1[j];
            let y = curve.z2[i] - curve.z2[j];
            let zero = if periodic { y.cosh() - x.cos() == 0.0 } else { x == 0.0 && y == 0.0 };
            if zero {
                return TurnwaveError::SelfIntersection { i, j };
            }
        }
    }
    TurnwaveError::BlowUp { t: f64::NAN, what: "non-finite Muskat velocity".into() }
}

/// Logarithmic contribution of the flat tails beyond `[-L, L]`, per target node.
fn open_tail(curve: &Curve, grid: &OpenGrid) -> Vec<f64> {
    let (p_l, c_l, p_r, c_r) = curve.tail_offsets();
    let l = grid.l;
    let n = grid.len();
    // the end nodes sit on the junction; keep the logarithm finite there
    let floor = (grid.alpha[n - 1] - grid.alpha[n - 2]).powi(2);
    curve
        .z1
        .iter()
        .zip(&curve.z2)
        .map(|(&a, &b)| {
            let ar = a - p_r - l;
            let al = a - p_l + l;
            let num = (ar * ar + (b - c_r).powi(2)).max(floor);
            let den = (al * al + (b - c_l).powi(2)).max(floor);
            0.5 * (num / den).ln()
        })
        .collect()
}

/// Open-line Muskat right-hand side
/// `(rho_jump / 2pi) PV int dz1/|dz|^2 (dz(alpha) - dz(beta)) dbeta`.
///
/// The curve is continued by flat tails beyond `[-L, L]`; their contribution is
/// added in closed form.
pub fn muskat_rhs_open(curve: &Curve, rho_jump: f64) -> Result<Velocity> {
    let grid = match &**curve.grid() {
        Grid::Open(g) => g,
        Grid::Periodic { .. } => {
            return Err(TurnwaveError::InvalidArgument("open kernel applied to a periodic curve".into()))
        }
    };
    let n = curve.len();
    let (d1, d2, dd1, dd2) = curve.kernel_derivatives();
    let w = &grid.weights;
    let (z1, z2) = (&curve.z1, &curve.z2);
    let pre = rho_jump / (2.0 * PI);
    let tail = open_tail(curve, grid);

    let row = |i: usize, stride: usize| -> (f64, f64) {
        let m = (n - 1) / stride + 1;
        let weight = |q: usize| w[q * stride] * stride as f64;
        let kern = |q: usize| -> Pair {
            let j = q * stride;
            if j == i {
                let g = d1[i] / (d1[i] * d1[i] + d2[i] * d2[i]);
                return Pair(weight(q) * g * dd1[i], weight(q) * g * dd2[i]);
            }
            let x = z1[i] - z1[j];
            let y = z2[i] - z2[j];
            let k = weight(q) * x / (x * x + y * y);
            Pair(k * (d1[i] - d1[j]), k * (d2[i] - d2[j]))
        };
        let r = pairwise_sum2(0, m, &kern);
        let a = r.0 + tail[i] * (d1[i] - 1.0);
        let b = r.1 + tail[i] * d2[i];
        (pre * a, pre * b)
    };

    let (v1, v2): (Vec<f64>, Vec<f64>) = (0..n).into_par_iter().map(|i| row(i, 1)).unzip();
    if v1.iter().chain(&v2).any(|v| !v.is_finite()) {
        return Err(non_finite_cause(curve, false));
    }
    // half-resolution comparison at a few even-indexed targets
    let c = grid.center();
    let mut error_estimate: f64 = 0.0;
    for &i in &[c, (c / 2) & !1, (c + c / 2) & !1] {
        let (a, b) = row(i, 2);
        error_estimate = error_estimate.max((a - v1[i]).abs()).max((b - v2[i]).abs());
    }
    Ok(Velocity { v1, v2, error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_contour_br_is_half_hilbert() {
        let n = 256;
        let flat = Curve::periodic_from_fn(n, |a| (a, 0.0)).unwrap();
        for k in [1.0, 3.0] {
            let om: Vec<f64> = flat.alpha().iter().map(|a| (k * a).cos()).collect();
            let v = birkhoff_rott(&flat, &om).unwrap();
            for (i, a) in flat.alpha().iter().enumerate() {
                assert!(v.v1[i].abs() < 1e-12);
                assert!((v.v2[i] - 0.5 * (k * a).sin()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_velocity() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.3 * a.sin())).unwrap();
        let v = birkhoff_rott(&c, &vec![0.0; 64]).unwrap();
        assert!(v.max_abs() == 0.0);
    }

    #[test]
    fn odd_grid_rejected() {
        let c = Curve::periodic_from_fn(63, |a| (a, 0.0)).unwrap();
        assert!(matches!(birkhoff_rott(&c, &vec![1.0; 63]), Err(TurnwaveError::OddGrid(63))));
    }

    #[test]
    fn flat_muskat_is_at_rest() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.7)).unwrap();
        let v = muskat_rhs_periodic(&c, 1.0).unwrap();
        assert!(v.max_abs() < 1e-14);
        let g = Grid::open(256, 40.0, 5.0).unwrap();
        for c2 in [0.0, 0.4] {
            let o = Curve::open_from_fn(g.clone(), |a| (a, c2)).unwrap();
            let v = muskat_rhs_open(&o, 1.0).unwrap();
            assert!(v.max_abs() < 1e-13);
        }
    }

    #[test]
    fn reflection_symmetry_periodic() {
        let n = 128;
        let c = Curve::periodic_from_fn(n, |a| (a + 0.2 * a.sin(), 0.3 * a.cos() + 0.1 * (2.0 * a).cos())).unwrap();
        let v = muskat_rhs_periodic(&c, 1.0).unwrap();
        for i in 1..n {
            let j = n - i;
            assert!((v.v1[i] + v.v1[j]).abs() < 1e-12);
            assert!((v.v2[i] - v.v2[j]).abs() < 1e-12);
        }
    }
}
