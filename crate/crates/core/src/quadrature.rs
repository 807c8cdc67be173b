//! Summation and finite-difference building blocks.

use std::ops::{Add, Mul};

const PAIRWISE_BASE: usize = 32;

/// Pairwise (cascade) sum of `term(i)` for `i` in `lo..hi`.
///
/// The summation tree depends only on the range, never on thread layout, so
/// results are bit-stable.
pub fn pairwise_sum<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
    let len = hi - lo;
    if len <= PAIRWISE_BASE {
        let mut s = 0.0;
        for i in lo..hi {
            s += term(i);
        }
        return s;
    }
    let mid = lo + len / 2;
    pairwise_sum(lo, mid, term) + pairwise_sum(mid, hi, term)
}

/// Pairwise sum for any additive type with a zero.
pub fn pairwise_sum_generic<T, F>(lo: usize, hi: usize, zero: T, term: &F) -> T
where
    T: Copy + Add<Output = T>,
    F: Fn(usize) -> T,
{
    let len = hi - lo;
    if len <= PAIRWISE_BASE {
        let mut s = zero;
        for i in lo..hi {
            s = s + term(i);
        }
        return s;
    }
    let mid = lo + len / 2;
    pairwise_sum_generic(lo, mid, zero, term) + pairwise_sum_generic(mid, hi, zero, term)
}

/// Two accumulators summed together, so a kernel is evaluated once per pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pair(pub f64, pub f64);

impl Add for Pair {
    type Output = Pair;
    #[inline]
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

/// Pairwise sum of a two-component term.
pub fn pairwise_sum2<F: Fn(usize) -> Pair>(lo: usize, hi: usize, term: &F) -> Pair {
    pairwise_sum_generic(lo, hi, Pair(0.0, 0.0), term)
}

/// Fornberg weights for the `m`-th derivative at `x0` from the nodes `x`.
pub fn fornberg_weights(x0: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - x0;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}

/// Cumulative integral of equally spaced samples, fourth order at even nodes
/// (composite Simpson) and third order at odd nodes.
pub fn cumulative_simpson<T>(f: &[T], h: f64, zero: T) -> Vec<T>
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len() - 1;
    let mut out = Vec::with_capacity(n + 1);
    out.push(zero);
    for j in 1..=n {
        let v = if j % 2 == 0 {
            out[j - 2] + (f[j - 2] + f[j - 1] * 4.0 + f[j]) * (h / 3.0)
        } else if j < n {
            out[j - 1] + (f[j - 1] * 5.0 + f[j] * 8.0 + f[j + 1] * (-1.0)) * (h / 12.0)
        } else if j >= 2 {
            out[j - 1] + (f[j - 2] * (-1.0) + f[j - 1] * 8.0 + f[j] * 5.0) * (h / 12.0)
        } else {
            out[j - 1] + (f[j - 1] + f[j]) * (h / 2.0)
        };
        out.push(v);
    }
    out
}
