//! Interface representation and geometric diagnostics.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TurnwaveError};
use crate::quadrature::fornberg_weights;
use crate::spectral;

/// Slopes at or below this value count as a vertical tangent.
pub const SLOPE_TOL: f64 = 1e-10;

const GHOST: usize = 6;
const GHOST_WIDTH: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    Periodic2Pi,
    OpenDecaying,
}

#[derive(Debug, Clone)]
struct Stencil {
    start: usize,
    weights: Vec<f64>,
}

/// Symmetric graded grid `alpha = L sinh(kappa s) / sinh(kappa)` on `s` in `[-1, 1]`.
///
/// `n_intervals` is even, so there are `n_intervals + 1` nodes and one sits at 0.
#[derive(Debug, Clone)]
pub struct OpenGrid {
    pub l: f64,
    pub kappa: f64,
    pub n_intervals: usize,
    pub alpha: Vec<f64>,
    /// Trapezoid weights in `s`, mapped to `alpha`.
    pub weights: Vec<f64>,
    interior: Vec<Vec<Stencil>>,
    ghost_alpha: Vec<f64>,
    ghost: Vec<Vec<Stencil>>,
}

impl OpenGrid {
    pub fn new(n_intervals: usize, l: f64, kappa: f64) -> Result<Self> {
        if n_intervals % 2 != 0 {
            return Err(TurnwaveError::OddGrid(n_intervals));
        }
        if n_intervals < 16 {
            return Err(TurnwaveError::InvalidArgument(format!(
                "open grid needs at least 16 intervals, got {n_intervals}"
            )));
        }
        if !(l > 0.0) || !(kappa >= 0.0) {
            return Err(TurnwaveError::InvalidArgument(format!("bad open grid L={l}, kappa={kappa}")));
        }
        let hs = 2.0 / n_intervals as f64;
        let map = |s: f64| -> (f64, f64) {
            if kappa < 1e-12 {
                (l * s, l)
            } else {
                let d = kappa.sinh();
                (l * (kappa * s).sinh() / d, l * kappa * (kappa * s).cosh() / d)
            }
        };
        let half = n_intervals / 2;
        let mut alpha = Vec::with_capacity(n_intervals + 1);
        let mut weights = Vec::with_capacity(n_intervals + 1);
        for i in 0..=n_intervals {
            let s = (i as f64 - half as f64) * hs;
            let (a, ga) = map(s);
            alpha.push(a);
            weights.push(ga * hs);
        }
        // exact symmetry and an exact zero in the middle
        alpha[half] = 0.0;
        for i in 0..half {
            let v = 0.5 * (alpha[n_intervals - i] - alpha[i]);
            alpha[i] = -v;
            alpha[n_intervals - i] = v;
        }
        weights[0] *= 0.5;
        weights[n_intervals] *= 0.5;

        let n = alpha.len();
        let mut interior = Vec::new();
        for order in 1..=5usize {
            let width = if order <= 2 { 11 } else if order <= 4 { 13 } else { 15 };
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                let start = i.saturating_sub(width / 2).min(n - width);
                let w = fornberg_weights(alpha[i], &alpha[start..start + width], order);
                row.push(Stencil { start, weights: w });
            }
            interior.push(row);
        }

        let mut ghost_alpha = Vec::with_capacity(n + 2 * GHOST);
        for g in (1..=GHOST).rev() {
            ghost_alpha.push(map(-1.0 - g as f64 * hs).0);
        }
        ghost_alpha.extend_from_slice(&alpha);
        for g in 1..=GHOST {
            ghost_alpha.push(map(1.0 + g as f64 * hs).0);
        }
        let mut ghost = Vec::new();
        for order in 1..=2usize {
            let row = (0..n)
                .map(|i| {
                    let c = i + GHOST;
                    let start = c - GHOST_WIDTH / 2;
                    Stencil {
                        start,
                        weights: fornberg_weights(ghost_alpha[c], &ghost_alpha[start..start + GHOST_WIDTH], order),
                    }
                })
                .collect();
            ghost.push(row);
        }
        Ok(Self { l, kappa, n_intervals, alpha, weights, interior, ghost_alpha, ghost })
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn center(&self) -> usize {
        self.n_intervals / 2
    }

    /// Derivative from stencils that stay inside `[-L, L]` (one-sided near the ends).
    pub fn diff(&self, f: &[f64], order: usize) -> Vec<f64> {
        self.interior[order - 1]
            .iter()
            .map(|st| st.weights.iter().zip(&f[st.start..]).map(|(w, v)| w * v).sum())
            .collect()
    }

    /// Derivative of `f` continued by its end values beyond `[-L, L]` (flat tails).
    pub fn diff_flat_tail(&self, f: &[f64], order: usize) -> Vec<f64> {
        let n = f.len();
        let ext: Vec<f64> = (0..self.ghost_alpha.len())
            .map(|k| {
                if k < GHOST {
                    f[0]
                } else if k >= GHOST + n {
                    f[n - 1]
                } else {
                    f[k - GHOST]
                }
            })
            .collect();
        self.ghost[order - 1]
            .iter()
            .map(|st| st.weights.iter().zip(&ext[st.start..]).map(|(w, v)| w * v).sum())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub enum Grid {
    Periodic { alpha: Vec<f64> },
    Open(OpenGrid),
}

impl Grid {
    pub fn periodic(n: usize) -> Arc<Grid> {
        Arc::new(Grid::Periodic { alpha: spectral::uniform_grid(n) })
    }

    pub fn open(n_intervals: usize, l: f64, kappa: f64) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::Open(OpenGrid::new(n_intervals, l, kappa)?)))
    }

    pub fn alpha(&self) -> &[f64] {
        match self {
            Grid::Periodic { alpha } => alpha,
            Grid::Open(g) => &g.alpha,
        }
    }

    pub fn topology(&self) -> Topology {
        match self {
            Grid::Periodic { .. } => Topology::Periodic2Pi,
            Grid::Open(_) => Topology::OpenDecaying,
        }
    }

    /// Index of the node at `alpha = 0`.
    pub fn origin_index(&self) -> usize {
        match self {
            Grid::Periodic { .. } => 0,
            Grid::Open(g) => g.center(),
        }
    }
}

/// Sampled interface `alpha -> (z1, z2)`.
///
/// For periodic curves `z1 - alpha` and `z2` are 2pi-periodic.
#[derive(Debug, Clone)]
pub struct Curve {
    grid: Arc<Grid>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
}

/// Result of [`Curve::min_slope`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub min_slope: f64,
    pub argmin_alpha: f64,
    pub vertical_tangent: bool,
}

/// Graph samples `f(x_i)` on a uniform grid in the horizontal coordinate.
#[derive(Debug, Clone)]
pub struct GraphSamples {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

impl Curve {
    pub fn new(grid: Arc<Grid>, z1: Vec<f64>, z2: Vec<f64>) -> Result<Self> {
        let n = grid.alpha().len();
        if z1.len() != n || z2.len() != n {
            return Err(TurnwaveError::InvalidArgument(format!(
                "curve arrays of length {}/{} on a grid of {n} nodes",
                z1.len(),
                z2.len()
            )));
        }
        if z1.iter().chain(&z2).any(|v| !v.is_finite()) {
            return Err(TurnwaveError::InvalidArgument("non-finite curve samples".into()));
        }
        Ok(Self { grid, z1, z2 })
    }

    /// Periodic curve from a closure of `alpha`.
    pub fn periodic_from_fn(n: usize, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let grid = Grid::periodic(n);
        let (z1, z2) = grid.alpha().iter().map(|&a| f(a)).unzip();
        Curve::new(grid, z1, z2)
    }

    /// Open curve on a graded grid from a closure of `alpha`.
    pub fn open_from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        if grid.topology() != Topology::OpenDecaying {
            return Err(TurnwaveError::InvalidArgument("open curve needs an open grid".into()));
        }
        let (z1, z2) = grid.alpha().iter().map(|&a| f(a)).unzip();
        Curve::new(grid, z1, z2)
    }

    pub fn with_values(&self, z1: Vec<f64>, z2: Vec<f64>) -> Result<Self> {
        Curve::new(self.grid.clone(), z1, z2)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn alpha(&self) -> &[f64] {
        self.grid.alpha()
    }

    pub fn topology(&self) -> Topology {
        self.grid.topology()
    }

    pub fn is_periodic(&self) -> bool {
        self.topology() == Topology::Periodic2Pi
    }

    pub fn len(&self) -> usize {
        self.z1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z1.is_empty()
    }

    pub fn open_grid(&self) -> Option<&OpenGrid> {
        match &*self.grid {
            Grid::Open(g) => Some(g),
            Grid::Periodic { .. } => None,
        }
    }

    /// `z1 - alpha`, the periodic (or decaying) part of the horizontal coordinate.
    pub fn p(&self) -> Vec<f64> {
        self.z1.iter().zip(self.alpha()).map(|(z, a)| z - a).collect()
    }

    /// Per-component `d^order/d alpha^order`.
    pub fn derivative(&self, order: u32) -> Result<(Vec<f64>, Vec<f64>)> {
        if order == 0 || order > 5 {
            return Err(TurnwaveError::InvalidArgument(format!("derivative order {order} not in 1..=5")));
        }
        if self.len() < 16 {
            return Err(TurnwaveError::InvalidArgument(format!("need at least 16 nodes, got {}", self.len())));
        }
        let p = self.p();
        let (mut d1, d2) = match &*self.grid {
            Grid::Periodic { .. } => (spectral::derivative(&p, order), spectral::derivative(&self.z2, order)),
            Grid::Open(g) => (g.diff(&p, order as usize), g.diff(&self.z2, order as usize)),
        };
        if order == 1 {
            d1.iter_mut().for_each(|v| *v += 1.0);
        }
        Ok((d1, d2))
    }

    /// First and second derivatives used by the contour kernels.
    ///
    /// Open curves are continued by flat tails, matching the tail model of the kernels.
    pub fn kernel_derivatives(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = self.p();
        match &*self.grid {
            Grid::Periodic { .. } => {
                let cp = spectral::fft_real(&p);
                let c2 = spectral::fft_real(&self.z2);
                let mut d1 = spectral::ifft_real(&spectral::derivative_coeffs(&cp, 1));
                d1.iter_mut().for_each(|v| *v += 1.0);
                let d2 = spectral::ifft_real(&spectral::derivative_coeffs(&c2, 1));
                let dd1 = spectral::ifft_real(&spectral::derivative_coeffs(&cp, 2));
                let dd2 = spectral::ifft_real(&spectral::derivative_coeffs(&c2, 2));
                (d1, d2, dd1, dd2)
            }
            Grid::Open(g) => {
                let mut d1 = g.diff_flat_tail(&p, 1);
                d1.iter_mut().for_each(|v| *v += 1.0);
                (d1, g.diff_flat_tail(&self.z2, 1), g.diff_flat_tail(&p, 2), g.diff_flat_tail(&self.z2, 2))
            }
        }
    }

    /// `sup F(z)` with `F = |beta|^2 / |z(alpha) - z(alpha - beta)|^2` over node pairs.
    pub fn arc_chord(&self) -> Result<f64> {
        let (d1, d2) = self.derivative(1)?;
        let n = self.len();
        let alpha = self.alpha();
        let periodic = self.is_periodic();
        let rows: Vec<std::result::Result<f64, (usize, usize)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best = 1.0 / (d1[i] * d1[i] + d2[i] * d2[i]);
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let mut beta = alpha[i] - alpha[j];
                    let mut dz1 = self.z1[i] - self.z1[j];
                    if periodic {
                        let m = if beta > PI {
                            -2.0 * PI
                        } else if beta <= -PI {
                            2.0 * PI
                        } else {
                            0.0
                        };
                        beta += m;
                        dz1 += m;
                    }
                    let dz2 = self.z2[i] - self.z2[j];
                    let den = dz1 * dz1 + dz2 * dz2;
                    if den == 0.0 {
                        return Err((i.min(j), i.max(j)));
                    }
                    let f = beta * beta / den;
                    if f > best {
                        best = f;
                    }
                }
                Ok(best)
            })
            .collect();
        let mut sup: f64 = 0.0;
        for r in rows {
            match r {
                Ok(v) => sup = sup.max(v),
                Err((i, j)) => return Err(TurnwaveError::SelfIntersection { i, j }),
            }
        }
        if !sup.is_finite() {
            return Err(TurnwaveError::SingularParameterization { alpha: 0.0 });
        }
        Ok(sup)
    }

    /// Minimum of `d z1 / d alpha` with three-point quadratic refinement.
    pub fn min_slope(&self) -> Result<SlopeReport> {
        let (d1, _) = self.derivative(1)?;
        Ok(slope_report(&d1, self.alpha(), self.is_periodic()))
    }

    /// `sup |d f / d x|` of the graph parameterization, `+inf` once a slope is not positive.
    pub fn graph_slope_sup(&self) -> Result<f64> {
        let (d1, d2) = self.derivative(1)?;
        let mut sup: f64 = 0.0;
        for (a, b) in d1.iter().zip(&d2) {
            if *a <= 0.0 {
                return Ok(f64::INFINITY);
            }
            sup = sup.max((b / a).abs());
        }
        Ok(sup)
    }

    /// Reparameterize as a graph `(x, f(x))` on a uniform grid.
    pub fn as_graph(&self) -> Result<GraphSamples> {
        let rep = self.min_slope()?;
        if rep.vertical_tangent || rep.min_slope <= SLOPE_TOL {
            return Err(TurnwaveError::NotAGraph { min_slope: rep.min_slope, alpha: rep.argmin_alpha });
        }
        match &*self.grid {
            Grid::Periodic { alpha } => {
                let cp = spectral::fft_real(&self.p());
                let c2 = spectral::fft_real(&self.z2);
                let dcp = spectral::derivative_coeffs(&cp, 1);
                let f: Vec<f64> = alpha
                    .par_iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        if self.z1[i] == x {
                            return self.z2[i];
                        }
                        let mut a = x - (self.z1[i] - x);
                        for _ in 0..50 {
                            let za = a + spectral::trig_eval(&cp, Complex64::new(a, 0.0)).re;
                            let da = 1.0 + spectral::trig_eval(&dcp, Complex64::new(a, 0.0)).re;
                            let step = (za - x) / da;
                            a -= step;
                            if step.abs() < 1e-15 {
                                break;
                            }
                        }
                        spectral::trig_eval(&c2, Complex64::new(a, 0.0)).re
                    })
                    .collect();
                Ok(GraphSamples { x: alpha.clone(), f })
            }
            Grid::Open(g) => {
                let n = g.len();
                let lo = self.z1[0];
                let hi = self.z1[n - 1];
                let x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
                let f = x
                    .iter()
                    .map(|&xv| lagrange_at(&self.z1, &self.z2, xv, 6))
                    .collect();
                Ok(GraphSamples { x, f })
            }
        }
    }

    /// Trigonometric interpolant of a periodic curve at an arbitrary parameter.
    pub fn eval_periodic(&self, alpha: f64) -> Result<(f64, f64)> {
        if !self.is_periodic() {
            return Err(TurnwaveError::InvalidArgument("eval_periodic on an open curve".into()));
        }
        let cp = spectral::fft_real(&self.p());
        let c2 = spectral::fft_real(&self.z2);
        let x = Complex64::new(alpha, 0.0);
        Ok((alpha + spectral::trig_eval(&cp, x).re, spectral::trig_eval(&c2, x).re))
    }

    /// Constant offsets of the flat tails: `(p_left, z2_left, p_right, z2_right)`.
    pub fn tail_offsets(&self) -> (f64, f64, f64, f64) {
        let n = self.len();
        let a = self.alpha();
        (self.z1[0] - a[0], self.z2[0], self.z1[n - 1] - a[n - 1], self.z2[n - 1])
    }
}

pub(crate) fn slope_report(d1: &[f64], alpha: &[f64], periodic: bool) -> SlopeReport {
    let n = d1.len();
    let mut i = 0;
    for k in 1..n {
        if d1[k] < d1[i] {
            i = k;
        }
    }
    let mut min = d1[i];
    let mut arg = alpha[i];
    let neighbours = if periodic {
        Some(((i + n - 1) % n, (i + 1) % n))
    } else if i > 0 && i + 1 < n {
        Some((i - 1, i + 1))
    } else {
        None
    };
    if let Some((l, r)) = neighbours {
        let h_l = if periodic { 2.0 * PI / n as f64 } else { alpha[i] - alpha[l] };
        let h_r = if periodic { 2.0 * PI / n as f64 } else { alpha[r] - alpha[i] };
        // parabola through (-h_l, y_l), (0, y_0), (h_r, y_r)
        let (yl, y0, yr) = (d1[l], d1[i], d1[r]);
        let a = ((yr - y0) / h_r + (yl - y0) / h_l) / (h_l + h_r);
        let b = (yr - y0) / h_r - a * h_r;
        if a > 0.0 {
            let x = (-b / (2.0 * a)).clamp(-h_l, h_r);
            let v = y0 + b * x + a * x * x;
            if v < min {
                min = v;
                arg += x;
            }
        }
    }
    SlopeReport { min_slope: min, argmin_alpha: arg, vertical_tangent: min <= SLOPE_TOL }
}

/// Local Lagrange interpolation of `y(x)` on increasing nodes `x`.
pub(crate) fn lagrange_at(x: &[f64], y: &[f64], xv: f64, width: usize) -> f64 {
    let n = x.len();
    let pos = x.partition_point(|&v| v < xv);
    let start = pos.saturating_sub(width / 2).min(n - width);
    let xs = &x[start..start + width];
    let w = fornberg_weights(xv, xs, 0);
    w.iter().zip(&y[start..start + width]).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_derivative_of_sinusoid() {
        let c = Curve::periodic_from_fn(64, |a| (a, a.sin())).unwrap();
        let (d1, d2) = c.derivative(1).unwrap();
        for (i, a) in c.alpha().iter().enumerate() {
            assert!((d1[i] - 1.0).abs() < 1e-13);
            assert!((d2[i] - a.cos()).abs() < 1e-13);
        }
        let (e1, e2) = c.derivative(3).unwrap();
        assert!(e1.iter().all(|v| v.abs() < 1e-12));
        assert!(e2.iter().zip(c.alpha()).all(|(v, a)| (v + a.cos()).abs() < 1e-11));
    }

    #[test]
    fn flat_line_derivatives() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        for order in 1..=5 {
            let (d1, d2) = c.derivative(order).unwrap();
            let expect = if order == 1 { 1.0 } else { 0.0 };
            assert!(d1.iter().all(|v| (v - expect).abs() < 1e-12));
            assert!(d2.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn derivative_argument_checks() {
        let c = Curve::periodic_from_fn(32, |a| (a, 0.0)).unwrap();
        assert!(c.derivative(6).is_err());
        assert!(c.derivative(0).is_err());
        let small = Curve::periodic_from_fn(8, |a| (a, 0.0)).unwrap();
        assert!(small.derivative(1).is_err());
    }

    #[test]
    fn open_second_derivative_of_gaussian() {
        let g = Grid::open(1024, 40.0, 5.0).unwrap();
        let c = Curve::open_from_fn(g, |a| (a, (-a * a).exp())).unwrap();
        let (_, d2) = c.derivative(2).unwrap();
        let i0 = c.grid().origin_index();
        assert!((d2[i0] + 2.0).abs() < 1e-6, "{}", d2[i0]);
    }

    #[test]
    fn arc_chord_flat_is_one() {
        let c = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        assert_eq!(c.arc_chord().unwrap(), 1.0);
    }

    #[test]
    fn arc_chord_detects_coincident_nodes() {
        let mut c = Curve::periodic_from_fn(32, |a| (a, a.sin())).unwrap();
        c.z1[5] = c.z1[9];
        c.z2[5] = c.z2[9];
        assert!(matches!(c.arc_chord(), Err(TurnwaveError::SelfIntersection { .. })));
    }

    #[test]
    fn slope_reports() {
        let flat = Curve::periodic_from_fn(64, |a| (a, 0.0)).unwrap();
        let r = flat.min_slope().unwrap();
        assert!((r.min_slope - 1.0).abs() < 1e-14 && !r.vertical_tangent);
        let turned = Curve::periodic_from_fn(64, |a| (a - 2.0 * a.sin(), a.cos())).unwrap();
        let r = turned.min_slope().unwrap();
        assert!((r.min_slope + 1.0).abs() < 1e-12);
        assert!(r.argmin_alpha.abs() < 1e-12);
        assert!(r.vertical_tangent);
        assert!(matches!(turned.as_graph(), Err(TurnwaveError::NotAGraph { .. })));
    }

    #[test]
    fn graph_of_sine_is_exact() {
        let c = Curve::periodic_from_fn(64, |a| (a, a.sin())).unwrap();
        let g = c.as_graph().unwrap();
        for (i, x) in g.x.iter().enumerate() {
            assert_eq!(g.f[i], x.sin());
        }
    }

    #[test]
    fn graph_round_trip() {
        let c = Curve::periodic_from_fn(1024, |a| (a + 0.3 * a.sin(), a.cos())).unwrap();
        let g = c.as_graph().unwrap();
        let cf = spectral::fft_real(&g.f);
        for i in (0..1024).step_by(7) {
            let v = spectral::trig_eval(&cf, Complex64::new(c.z1[i], 0.0)).re;
            assert!((v - c.z2[i]).abs() < 1e-6);
        }
    }
}
