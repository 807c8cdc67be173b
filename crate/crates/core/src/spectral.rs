//! Discrete Fourier helpers on the uniform periodic grid `alpha_j = 2 pi j / n`.
//!
//! Coefficients follow the unnormalized forward convention, so a sample vector
//! `f` has `f_j = (1/n) sum_k c_k exp(i k alpha_j)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((n, inverse))
            .or_insert_with(|| {
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// In-place forward transform, unnormalized.
pub fn fft_in_place(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place inverse transform including the `1/n` factor.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    plan(n, true).process(buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= s;
    }
}

pub fn fft_real(f: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_in_place(&mut buf);
    buf
}

pub fn fft_complex(f: &[Complex64]) -> Vec<Complex64> {
    let mut buf = f.to_vec();
    fft_in_place(&mut buf);
    buf
}

/// Real part of the inverse transform.
pub fn ifft_real(c: &[Complex64]) -> Vec<f64> {
    let mut buf = c.to_vec();
    ifft_in_place(&mut buf);
    buf.into_iter().map(|v| v.re).collect()
}

pub fn ifft_complex(c: &[Complex64]) -> Vec<Complex64> {
    let mut buf = c.to_vec();
    ifft_in_place(&mut buf);
    buf
}

/// Signed wavenumber of slot `i`; the Nyquist slot maps to `-n/2`.
#[inline]
pub fn wavenumber(i: usize, n: usize) -> f64 {
    if i < n.div_ceil(2) {
        i as f64
    } else {
        i as f64 - n as f64
    }
}

#[inline]
pub fn is_nyquist(i: usize, n: usize) -> bool {
    n % 2 == 0 && i == n / 2
}

pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

/// Multiply coefficients by `(i k)^order`; odd orders drop the Nyquist mode.
pub fn derivative_coeffs(c: &[Complex64], order: u32) -> Vec<Complex64> {
    let n = c.len();
    let unit = Complex64::new(0.0, 1.0);
    c.iter()
        .enumerate()
        .map(|(i, &v)| {
            if order == 0 {
                return v;
            }
            if order % 2 == 1 && is_nyquist(i, n) {
                return Complex64::new(0.0, 0.0);
            }
            v * (unit * wavenumber(i, n)).powu(order)
        })
        .collect()
}

/// Spectral derivative of periodic samples.
pub fn derivative(f: &[f64], order: u32) -> Vec<f64> {
    if order == 0 {
        return f.to_vec();
    }
    ifft_real(&derivative_coeffs(&fft_real(f), order))
}

/// Hilbert transform with symbol `-i sign(k)`; mean and Nyquist go to zero.
pub fn hilbert(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut c = fft_real(f);
    for (i, v) in c.iter_mut().enumerate() {
        let k = wavenumber(i, n);
        if k == 0.0 || is_nyquist(i, n) {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v *= Complex64::new(0.0, -k.signum());
        }
    }
    ifft_real(&c)
}

/// Periodic antiderivative with zero mean; the mean of `f` is discarded.
pub fn antiderivative_mean_zero(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut c = fft_real(f);
    for (i, v) in c.iter_mut().enumerate() {
        let k = wavenumber(i, n);
        if k == 0.0 || is_nyquist(i, n) {
            *v = Complex64::new(0.0, 0.0);
        } else {
            *v /= Complex64::new(0.0, k);
        }
    }
    ifft_real(&c)
}

/// Zero every coefficient whose modulus is strictly below `threshold * max`.
pub fn krasny_filter(coeffs: &[Complex64], threshold: f64) -> Vec<Complex64> {
    let mut out = coeffs.to_vec();
    krasny_filter_in_place(&mut out, threshold);
    out
}

pub fn krasny_filter_in_place(coeffs: &mut [Complex64], threshold: f64) {
    if threshold <= 0.0 {
        return;
    }
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = threshold * max;
    for c in coeffs.iter_mut() {
        if c.norm() < floor {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Krasny filter applied to real periodic samples.
pub fn filter_samples(f: &[f64], threshold: f64) -> Vec<f64> {
    if threshold <= 0.0 {
        return f.to_vec();
    }
    let mut c = fft_real(f);
    krasny_filter_in_place(&mut c, threshold);
    ifft_real(&c)
}

/// Heat semigroup `exp(-k^2 tau)` on periodic samples.
pub fn heat_multiplier(f: &[f64], tau: f64) -> Vec<f64> {
    let n = f.len();
    let mut c = fft_real(f);
    for (i, v) in c.iter_mut().enumerate() {
        let k = wavenumber(i, n);
        *v *= (-k * k * tau).exp();
    }
    ifft_real(&c)
}

/// Evaluate the trigonometric interpolant at a (possibly complex) point.
///
/// The Nyquist mode is split symmetrically so the interpolant of real data
/// stays real on the real axis.
pub fn trig_eval(c: &[Complex64], x: Complex64) -> Complex64 {
    let n = c.len();
    let unit = Complex64::new(0.0, 1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in c.iter().enumerate() {
        if is_nyquist(i, n) {
            let k = (n / 2) as f64;
            acc += v * 0.5 * ((unit * k * x).exp() + (-unit * k * x).exp());
        } else {
            acc += v * (unit * wavenumber(i, n) * x).exp();
        }
    }
    acc / n as f64
}

/// Largest coefficient modulus in the top eighth of the band, relative to the largest overall.
pub fn relative_tail(c: &[Complex64]) -> f64 {
    let n = c.len();
    let max = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let cut = 3.0 * n as f64 / 8.0;
    c.iter()
        .enumerate()
        .filter(|(i, _)| wavenumber(*i, n).abs() > cut)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
        / max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_modes_is_spectral() {
        let n = 64;
        let a = uniform_grid(n);
        for k in 1..=16 {
            let f: Vec<f64> = a.iter().map(|&x| (k as f64 * x).sin()).collect();
            let d = derivative(&f, 1);
            for (j, &x) in a.iter().enumerate() {
                let exact = k as f64 * (k as f64 * x).cos();
                assert!((d[j] - exact).abs() < 1e-10 * k as f64);
            }
        }
    }

    #[test]
    fn hilbert_of_sin_is_minus_cos() {
        let a = uniform_grid(32);
        let f: Vec<f64> = a.iter().map(|x| x.sin()).collect();
        let h = hilbert(&f);
        for (j, x) in a.iter().enumerate() {
            assert!((h[j] + x.cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn krasny_rule() {
        let c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(1e-14, 0.0),
            Complex64::new(1e-3, 0.0),
        ];
        let out = krasny_filter(&c, 1e-10);
        assert_eq!(out[0].re, 1.0);
        assert_eq!(out[1].re, 0.0);
        assert_eq!(out[2].re, 1e-3);
        assert_eq!(krasny_filter(&c, 0.0), c);
        let flat = vec![Complex64::new(0.5, 0.0); 4];
        assert_eq!(krasny_filter(&flat, 0.5), flat);
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let a = uniform_grid(64);
        let f: Vec<f64> = a.iter().map(|x| (2.0 * x).cos() + 0.3 * x.sin()).collect();
        let g = antiderivative_mean_zero(&derivative(&f, 1));
        for j in 0..64 {
            assert!((g[j] - f[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn trig_eval_reproduces_nodes() {
        let a = uniform_grid(16);
        let f: Vec<f64> = a.iter().map(|x| (3.0 * x).cos() + (8.0 * x).cos()).collect();
        let c = fft_real(&f);
        for (j, &x) in a.iter().enumerate() {
            let v = trig_eval(&c, Complex64::new(x, 0.0));
            assert!((v.re - f[j]).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }
}
