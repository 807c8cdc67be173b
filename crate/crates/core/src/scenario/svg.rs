//! Deterministic SVG plots: fixed viewBox, fixed number formatting, no timestamps.

use std::fmt::Write as _;

use crate::closures::PhysicalConstants;
use crate::diagnostics::{negative_runs, sigma_muskat};
use crate::error::Result;
use crate::scenario::io::SnapshotFile;

const W: f64 = 800.0;
const H: f64 = 500.0;
const PAD: f64 = 50.0;

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn from_points<'a>(pts: impl Iterator<Item = (&'a f64, &'a f64)>) -> Self {
        let mut f = Frame { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
        for (x, y) in pts.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            f.x0 = f.x0.min(*x);
            f.x1 = f.x1.max(*x);
            f.y0 = f.y0.min(*y);
            f.y1 = f.y1.max(*y);
        }
        if !f.x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: -1.0, y1: 1.0 };
        }
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = *hi - *lo;
            let m = if span > 0.0 { 0.05 * span } else { 0.5 * lo.abs().max(1.0) };
            *lo -= m;
            *hi += m;
        };
        pad(&mut f.x0, &mut f.x1);
        pad(&mut f.y0, &mut f.y1);
        f
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD);
        let py = H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD);
        (px, py)
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="monospace" font-size="14" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    s
}

fn axes(s: &mut String, f: &Frame) {
    let (l, b) = (PAD, H - PAD);
    let _ = writeln!(s, r##"<path d="M{l} {PAD} L{l} {b} L{} {b}" stroke="#444" fill="none"/>"##, W - PAD);
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(s, r#"<text x="{x:.1}" y="{y:.1}" font-family="monospace" font-size="11" text-anchor="{anchor}">{v:.4}</text>"#);
    };
    label(s, l, b + 16.0, "start", f.x0);
    label(s, W - PAD, b + 16.0, "end", f.x1);
    label(s, l - 4.0, b, "end", f.y0);
    label(s, l - 4.0, PAD + 4.0, "end", f.y1);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn points(f: &Frame, xs: &[f64], ys: &[f64]) -> String {
    let mut p = String::new();
    for (x, y) in xs.iter().zip(ys) {
        if x.is_finite() && y.is_finite() {
            let (px, py) = f.map(*x, *y);
            let _ = write!(p, "{px:.3},{py:.3} ");
        }
    }
    p.trim_end().to_string()
}

/// Overlay of curve snapshots; nodes with `sigma < 0` are redrawn in red.
///
/// Each highlighted run carries its alpha-extent in `data-alpha-lo` / `data-alpha-hi`.
pub fn render_curves(snaps: &[SnapshotFile], consts: &PhysicalConstants, title: &str) -> Result<String> {
    let frame = Frame::from_points(snaps.iter().flat_map(|s| s.curve.z1.iter().zip(&s.curve.z2)));
    let mut s = header(title);
    axes(&mut s, &frame);
    let m = snaps.len();
    for (k, snap) in snaps.iter().enumerate() {
        // early snapshots light, late ones dark
        let shade = if m <= 1 { 50 } else { 200 - 150 * k / (m - 1) };
        let _ = writeln!(
            s,
            r#"<polyline data-t="{:?}" fill="none" stroke="rgb({shade},{shade},{})" stroke-width="1.2" points="{}"/>"#,
            snap.t,
            255 - shade / 2,
            points(&frame, &snap.curve.z1, &snap.curve.z2)
        );
    }
    for snap in snaps {
        let rep = sigma_muskat(&snap.curve, consts)?;
        let periodic = snap.curve.is_periodic();
        let n = snap.curve.len();
        let alpha = snap.curve.alpha();
        for (start, len) in negative_runs(&rep.sigma, periodic) {
            let idx: Vec<usize> = (0..len).map(|j| (start + j) % n).collect();
            let xs: Vec<f64> = idx.iter().map(|&i| snap.curve.z1[i]).collect();
            let ys: Vec<f64> = idx.iter().map(|&i| snap.curve.z2[i]).collect();
            let _ = writeln!(
                s,
                r#"<polyline class="rt-negative" data-t="{:?}" data-alpha-lo="{:?}" data-alpha-hi="{:?}" fill="none" stroke="red" stroke-width="2.5" points="{}"/>"#,
                snap.t,
                alpha[start],
                alpha[idx[len - 1]],
                points(&frame, &xs, &ys)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Line plot of one time series with a dashed zero line when zero is in range.
pub fn render_series(title: &str, xs: &[f64], ys: &[f64]) -> String {
    let frame = Frame::from_points(xs.iter().zip(ys));
    let mut s = header(title);
    axes(&mut s, &frame);
    if frame.y0 < 0.0 && frame.y1 > 0.0 {
        let (a, y) = frame.map(frame.x0, 0.0);
        let (b, _) = frame.map(frame.x1, 0.0);
        let _ = writeln!(s, r##"<path d="M{a:.3} {y:.3} L{b:.3} {y:.3}" stroke="#999" stroke-dasharray="4 3"/>"##);
    }
    let _ = writeln!(s, r#"<polyline fill="none" stroke="navy" stroke-width="1.5" points="{}"/>"#, points(&frame, xs, ys));
    s.push_str("</svg>\n");
    s
}
